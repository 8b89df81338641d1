// Copyright 2026 The phrprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phrprobe/dump_set.h"

#include "phrprobe/error.h"

namespace phrprobe {

DumpSet::DumpSet(std::vector<Dump> dumps) {
  for (Dump& d : dumps) add(std::move(d));
}

void DumpSet::add(Dump dump) {
  if (dumps_.empty()) {
    hidden_dim_ = dump.header.hidden_dim;
    num_layers_ = dump.header.num_layers;
  } else if (dump.header.hidden_dim != hidden_dim_ ||
             dump.header.num_layers != num_layers_) {
    throw Error("mixed_dims",
                "dump shape (D=" + std::to_string(dump.header.hidden_dim) +
                    ", L=" + std::to_string(dump.header.num_layers) +
                    ") differs from (D=" + std::to_string(hidden_dim_) +
                    ", L=" + std::to_string(num_layers_) + ")");
  }
  dumps_.push_back(std::move(dump));
  reindex();
}

void DumpSet::reindex() {
  by_key_.clear();
  by_item_.clear();
  words_.clear();
  for (const Dump& dump : dumps_) {
    std::map<std::uint64_t, const SequenceRecord*> records;
    for (const SequenceRecord& r : dump.records) records[r.record_id] = &r;
    for (const ManifestEntry& e : dump.manifest) {
      auto it = records.find(e.record_id);
      if (it == records.end()) continue;
      RecordRef ref{it->second, &e};
      by_key_.try_emplace({e.item_id, e.role, e.phrase_text}, ref);
      by_item_.try_emplace({e.item_id, e.role}, ref);
      if (e.role == RecordRole::kLandmarkWord) {
        words_.try_emplace(e.phrase_text, ref);
      }
    }
  }
}

std::optional<RecordRef> DumpSet::find(const std::string& item_id,
                                       RecordRole role) const {
  auto it = by_item_.find({item_id, role});
  if (it == by_item_.end()) return std::nullopt;
  return it->second;
}

std::optional<RecordRef> DumpSet::find_landmark_word(
    const std::string& item_id, const std::string& word) const {
  auto it = by_key_.find({item_id, RecordRole::kLandmarkWord, word});
  if (it != by_key_.end()) return it->second;
  auto w = words_.find(word);
  if (w == words_.end()) return std::nullopt;
  return w->second;
}

}  // namespace phrprobe
