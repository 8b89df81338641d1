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

#include "phrprobe/pooling.h"

#include <algorithm>
#include <cctype>
#include <string>

#include "phrprobe/error.h"

namespace phrprobe {
namespace {

std::vector<float> mean_of_tokens(const SequenceRecord& record,
                                  std::uint32_t layer, std::uint32_t first,
                                  std::uint32_t last) {
  std::vector<double> acc(record.hidden_dim, 0.0);
  for (std::uint32_t t = first; t <= last; ++t) {
    const auto row = record.token(layer, t);
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += row[d];
  }
  const double count = static_cast<double>(last - first + 1);
  std::vector<float> out(acc.size());
  for (std::size_t d = 0; d < acc.size(); ++d) {
    out[d] = static_cast<float>(acc[d] / count);
  }
  return out;
}

std::vector<float> single_token(const SequenceRecord& record,
                                std::uint32_t layer, std::int32_t pos,
                                ReprType repr) {
  if (pos < 0) {
    throw Error("missing_special_token",
                std::string(to_string(repr)) + " requested but record_id " +
                    std::to_string(record.record_id) + " has no such token");
  }
  const auto row = record.token(layer, static_cast<std::uint32_t>(pos));
  return {row.begin(), row.end()};
}

}  // namespace

std::string_view to_string(ReprType repr) {
  switch (repr) {
    case ReprType::kCls: return "CLS";
    case ReprType::kHeadWord: return "HeadWord";
    case ReprType::kAvgPhrase: return "AvgPhrase";
    case ReprType::kAvgAll: return "AvgAll";
    case ReprType::kSep: return "SEP";
  }
  return "?";
}

ReprType parse_repr(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::erase(lower, '-');
  std::erase(lower, '_');
  for (ReprType r : kAllReprs) {
    std::string name(to_string(r));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (name == lower) return r;
  }
  throw Error("bad_repr", "unknown representation type '" +
                              std::string(text) + "'");
}

PooledVector pool(const SequenceRecord& record, std::uint32_t layer,
                  ReprType repr, std::optional<TokenSpan> head_span) {
  if (layer >= record.num_layers) {
    throw Error("layer_out_of_range",
                "layer " + std::to_string(layer) + " >= " +
                    std::to_string(record.num_layers));
  }
  PooledVector out{record.record_id, layer, repr, {}};
  switch (repr) {
    case ReprType::kCls:
      out.values = single_token(record, layer, record.cls_pos, repr);
      break;
    case ReprType::kSep:
      out.values = single_token(record, layer, record.sep_pos, repr);
      break;
    case ReprType::kHeadWord:
      if (head_span && head_span->start <= head_span->end &&
          head_span->end < record.num_tokens) {
        out.values =
            mean_of_tokens(record, layer, head_span->start, head_span->end);
      } else {
        out.values =
            mean_of_tokens(record, layer, record.span.end, record.span.end);
        out.head_fallback = true;
      }
      break;
    case ReprType::kAvgPhrase:
      out.values =
          mean_of_tokens(record, layer, record.span.start, record.span.end);
      break;
    case ReprType::kAvgAll:
      out.values = mean_of_tokens(record, layer, 0, record.num_tokens - 1);
      break;
  }
  return out;
}

std::pair<PooledVector, PooledVector> pool_pair(
    const SequenceRecord& source, const SequenceRecord& target,
    std::uint32_t layer, ReprType repr, std::optional<TokenSpan> source_head,
    std::optional<TokenSpan> target_head) {
  if (source.hidden_dim != target.hidden_dim) {
    throw Error("dimension_mismatch", "pair records differ in hidden_dim");
  }
  return {pool(source, layer, repr, source_head),
          pool(target, layer, repr, target_head)};
}

}  // namespace phrprobe
