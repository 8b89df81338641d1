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

#ifndef PHRPROBE_POOLING_H_
#define PHRPROBE_POOLING_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "phrprobe/embedding_store.h"

namespace phrprobe {

// The five phrase representations read off one layer of a sequence.
enum class ReprType { kCls, kHeadWord, kAvgPhrase, kAvgAll, kSep };

inline constexpr std::array<ReprType, 5> kAllReprs = {
    ReprType::kCls, ReprType::kHeadWord, ReprType::kAvgPhrase,
    ReprType::kAvgAll, ReprType::kSep};

std::string_view to_string(ReprType repr);
// Accepts the canonical names ("CLS", "HeadWord", "AvgPhrase", "AvgAll",
// "SEP"), case-insensitively.
ReprType parse_repr(std::string_view text);

struct PooledVector {
  std::uint64_t record_id = 0;
  std::uint32_t layer = 0;
  ReprType repr = ReprType::kAvgPhrase;
  std::vector<float> values;
  // Head-Word fell back to the last span token for lack of a head span.
  bool head_fallback = false;
};

// Pools one layer of `record` into a single D-dimensional vector. Means are
// accumulated in double precision and rounded once to float.
//
// `head_span` marks the sub-tokens of the phrase's final word; Head-Word
// averages them. Without it the last token of the phrase span is used.
//
// Throws Error("missing_special_token") when CLS/SEP is requested from a
// record without that token, Error("layer_out_of_range") for bad layers.
PooledVector pool(const SequenceRecord& record, std::uint32_t layer,
                  ReprType repr,
                  std::optional<TokenSpan> head_span = std::nullopt);

std::pair<PooledVector, PooledVector> pool_pair(
    const SequenceRecord& source, const SequenceRecord& target,
    std::uint32_t layer, ReprType repr,
    std::optional<TokenSpan> source_head = std::nullopt,
    std::optional<TokenSpan> target_head = std::nullopt);

}  // namespace phrprobe

#endif  // PHRPROBE_POOLING_H_
