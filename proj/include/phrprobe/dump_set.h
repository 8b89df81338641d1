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

#ifndef PHRPROBE_DUMP_SET_H_
#define PHRPROBE_DUMP_SET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "phrprobe/embedding_store.h"

namespace phrprobe {

// A record together with its manifest entry.
struct RecordRef {
  const SequenceRecord* record = nullptr;
  const ManifestEntry* entry = nullptr;

  std::optional<TokenSpan> head_span() const {
    return entry ? entry->head_span : std::nullopt;
  }
};

// One or more dumps sharing hidden_dim and num_layers, indexed by manifest
// (item_id, role). Landmark words are additionally indexed by their text so
// items may share a single landmark record.
class DumpSet {
 public:
  DumpSet() = default;
  explicit DumpSet(std::vector<Dump> dumps);
  // Indexes point into owned dumps; moving keeps them valid, copying would not.
  DumpSet(const DumpSet&) = delete;
  DumpSet& operator=(const DumpSet&) = delete;
  DumpSet(DumpSet&&) = default;
  DumpSet& operator=(DumpSet&&) = default;

  // Throws Error("mixed_dims") when shapes disagree.
  void add(Dump dump);

  std::uint32_t hidden_dim() const { return hidden_dim_; }
  std::uint32_t num_layers() const { return num_layers_; }
  const std::vector<Dump>& dumps() const { return dumps_; }

  std::optional<RecordRef> find(const std::string& item_id,
                                RecordRole role) const;
  std::optional<RecordRef> find_landmark_word(const std::string& item_id,
                                              const std::string& word) const;

 private:
  void reindex();

  std::vector<Dump> dumps_;
  std::uint32_t hidden_dim_ = 0;
  std::uint32_t num_layers_ = 0;
  std::map<std::tuple<std::string, RecordRole, std::string>, RecordRef> by_key_;
  std::map<std::pair<std::string, RecordRole>, RecordRef> by_item_;
  std::map<std::string, RecordRef> words_;
};

}  // namespace phrprobe

#endif  // PHRPROBE_DUMP_SET_H_
