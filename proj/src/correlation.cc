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

#include "phrprobe/correlation.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "phrprobe/error.h"
#include "phrprobe/parallel.h"

namespace phrprobe {

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw Error("dimension_mismatch",
                "cosine of vectors with " + std::to_string(u.size()) +
                    " and " + std::to_string(v.size()) + " dims");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i], b = v[i];
    dot += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0 || vv == 0.0) throw Error("zero_norm", "cosine of zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::optional<double> pearson(std::span<const double> xs,
                              std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error("dimension_mismatch", "pearson inputs differ in length");
  }
  if (xs.size() < 2) throw Error("too_few_values", "pearson needs >= 2 values");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationGrid correlation_sweep(const DumpSet& dumps,
                                  const std::vector<SimilarityItem>& items,
                                  const std::vector<ReprType>& reprs,
                                  unsigned workers) {
  std::vector<std::pair<RecordRef, RecordRef>> pairs;
  std::vector<std::string> missing;
  for (const SimilarityItem& item : items) {
    auto src = dumps.find(item.item_id, RecordRole::kSource);
    auto trg = dumps.find(item.item_id, RecordRole::kTarget);
    if (!src) missing.push_back(item.item_id + "/source");
    if (!trg) missing.push_back(item.item_id + "/target");
    if (src && trg) pairs.emplace_back(*src, *trg);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      list += (i ? ", " : "") + missing[i];
    }
    if (missing.size() > 20) list += ", ...";
    throw Error("unresolved", std::to_string(missing.size()) +
                                  " records missing from dump: " + list);
  }

  std::vector<double> scores;
  scores.reserve(items.size());
  for (const auto& item : items) scores.push_back(item.score);

  auto grid = CorrelationGrid::make(dumps.num_layers(), reprs);
  std::vector<std::string> warnings(grid.cells.size());
  parallel_for(grid.cells.size(), workers, [&](std::size_t c) {
    const auto layer = static_cast<std::uint32_t>(c / reprs.size());
    const ReprType repr = reprs[c % reprs.size()];
    auto& cell = grid.cells[c];
    cell.extra.n = pairs.size();
    std::vector<double> cosines;
    cosines.reserve(pairs.size());
    std::size_t fallbacks = 0;
    try {
      for (const auto& [src, trg] : pairs) {
        auto [ps, pt] = pool_pair(*src.record, *trg.record, layer, repr,
                                  src.head_span(), trg.head_span());
        fallbacks += ps.head_fallback + pt.head_fallback;
        cosines.push_back(cosine(ps.values, pt.values));
      }
    } catch (const Error& e) {
      cell.reason = e.what();
      return;
    }
    if (fallbacks > 0) {
      warnings[c] = "layer " + std::to_string(layer) + " " +
                    std::string(to_string(repr)) + ": " +
                    std::to_string(fallbacks) +
                    " records lack a head span; used last span token";
    }
    if (pairs.size() < 2) {
      cell.reason = "fewer than two items";
      return;
    }
    cell.value = pearson(cosines, scores);
    if (!cell.value) cell.reason = "constant cosine or score sequence";
  });
  for (auto& w : warnings) {
    if (!w.empty()) grid.warnings.push_back(std::move(w));
  }
  return grid;
}

}  // namespace phrprobe
