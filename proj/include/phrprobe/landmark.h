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

#ifndef PHRPROBE_LANDMARK_H_
#define PHRPROBE_LANDMARK_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "phrprobe/dataset.h"
#include "phrprobe/dump_set.h"
#include "phrprobe/grid.h"
#include "phrprobe/pooling.h"

namespace phrprobe {

// A phrase and two landmark words; the phrase should sit closer to
// `positive` (the sense it selects) than to `negative`.
struct LandmarkItem {
  std::string item_id;
  Phrase phrase;
  std::string positive;
  std::string negative;
  // Slot reserved for a published item not yet transcribed.
  bool placeholder = false;

  bool operator==(const LandmarkItem&) const = default;
};

// Cosine differences within this margin count as undecided.
inline constexpr double kUndecidedMargin = 1e-9;

// JSON-lines {item_id?, phrase, pos, neg, placeholder?}. A missing item_id
// defaults to "lm-<index>". Throws ParseError for duplicate ids, missing
// fields, identical landmarks or single-word phrases.
std::vector<LandmarkItem> parse_landmark_items(std::istream& in);
std::vector<LandmarkItem> load_landmark_items(const std::filesystem::path& path);

// Fraction of decided items whose phrase is closer to the positive landmark.
// A cell with no decided items is undefined (input-independent layer).
// Throws Error("unresolved") when a phrase or landmark record is missing.
LandmarkGrid landmark_eval(const DumpSet& dumps,
                           const std::vector<LandmarkItem>& items,
                           const std::vector<ReprType>& reprs,
                           unsigned workers = 1);

}  // namespace phrprobe

#endif  // PHRPROBE_LANDMARK_H_
