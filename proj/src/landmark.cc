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

#include "phrprobe/landmark.h"

#include <fstream>
#include <istream>
#include <set>

#include <nlohmann/json.hpp>

#include "phrprobe/correlation.h"
#include "phrprobe/error.h"
#include "phrprobe/parallel.h"

namespace phrprobe {

std::vector<LandmarkItem> parse_landmark_items(std::istream& in) {
  using json = nlohmann::json;
  std::vector<LandmarkItem> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LandmarkItem item;
    try {
      const json j = json::parse(line);
      for (const char* key : {"phrase", "pos", "neg"}) {
        if (!j.contains(key)) {
          throw ParseError(std::string("missing field '") + key + "'", line_no);
        }
      }
      item.item_id = j.contains("item_id")
                         ? j["item_id"].get<std::string>()
                         : "lm-" + std::to_string(out.size());
      item.phrase = tokenize(j["phrase"].get<std::string>());
      const Phrase pos = tokenize(j["pos"].get<std::string>());
      const Phrase neg = tokenize(j["neg"].get<std::string>());
      item.placeholder = j.value("placeholder", false);
      if (pos.size() != 1 || neg.size() != 1) {
        throw ParseError("landmarks must be single words", line_no);
      }
      item.positive = pos.front();
      item.negative = neg.front();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad landmark item: ") + e.what(), line_no);
    }
    if (item.positive == item.negative) {
      throw ParseError("positive and negative landmark are identical", line_no);
    }
    if (item.phrase.size() < 2) {
      throw ParseError("landmark phrase needs at least two words", line_no);
    }
    if (!ids.insert(item.item_id).second) {
      throw ParseError("duplicate item_id '" + item.item_id + "'", line_no);
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<LandmarkItem> load_landmark_items(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return parse_landmark_items(in);
}

LandmarkGrid landmark_eval(const DumpSet& dumps,
                           const std::vector<LandmarkItem>& items,
                           const std::vector<ReprType>& reprs,
                           unsigned workers) {
  struct Resolved {
    RecordRef phrase, positive, negative;
  };
  std::vector<Resolved> resolved;
  std::vector<std::string> missing;
  for (const LandmarkItem& item : items) {
    auto phrase = dumps.find(item.item_id, RecordRole::kLandmarkPhrase);
    auto pos = dumps.find_landmark_word(item.item_id, item.positive);
    auto neg = dumps.find_landmark_word(item.item_id, item.negative);
    if (!phrase) missing.push_back(item.item_id + "/phrase");
    if (!pos) missing.push_back(item.item_id + "/" + item.positive);
    if (!neg) missing.push_back(item.item_id + "/" + item.negative);
    if (phrase && pos && neg) resolved.push_back({*phrase, *pos, *neg});
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) {
      list += (i ? ", " : "") + missing[i];
    }
    throw Error("unresolved", "landmark records missing: " + list);
  }

  auto grid = LandmarkGrid::make(dumps.num_layers(), reprs);
  parallel_for(grid.cells.size(), workers, [&](std::size_t c) {
    const auto layer = static_cast<std::uint32_t>(c / reprs.size());
    const ReprType repr = reprs[c % reprs.size()];
    auto& cell = grid.cells[c];
    std::size_t correct = 0;
    try {
      for (const Resolved& r : resolved) {
        const auto phrase =
            pool(*r.phrase.record, layer, repr, r.phrase.head_span());
        const auto pos =
            pool(*r.positive.record, layer, repr, r.positive.head_span());
        const auto neg =
            pool(*r.negative.record, layer, repr, r.negative.head_span());
        const double diff =
            cosine(phrase.values, pos.values) - cosine(phrase.values, neg.values);
        if (diff > kUndecidedMargin) {
          ++correct;
          ++cell.extra.n_decided;
        } else if (diff < -kUndecidedMargin) {
          ++cell.extra.n_decided;
        } else {
          ++cell.extra.n_undecided;
        }
      }
    } catch (const Error& e) {
      cell.extra = {0, resolved.size()};
      cell.reason = e.what();
      return;
    }
    if (cell.extra.n_decided == 0) {
      cell.reason = "all items undecided (representation independent of input)";
      return;
    }
    cell.value = static_cast<double>(correct) /
                 static_cast<double>(cell.extra.n_decided);
  });
  return grid;
}

}  // namespace phrprobe
