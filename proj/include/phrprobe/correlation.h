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

#ifndef PHRPROBE_CORRELATION_H_
#define PHRPROBE_CORRELATION_H_

#include <optional>
#include <span>
#include <vector>

#include "phrprobe/dataset.h"
#include "phrprobe/dump_set.h"
#include "phrprobe/grid.h"
#include "phrprobe/pooling.h"

namespace phrprobe {

// Cosine similarity accumulated in double precision, clamped to [-1, 1].
// Throws Error("dimension_mismatch") or Error("zero_norm").
double cosine(std::span<const float> u, std::span<const float> v);

// Pearson product-moment correlation. Returns nullopt when either sequence
// is constant. Throws Error for unequal lengths or fewer than two values.
std::optional<double> pearson(std::span<const double> xs,
                              std::span<const double> ys);

// Per (layer, repr): cosine of the pooled source/target vectors of every
// item, correlated with the human scores. Cells whose pooling or statistics
// are degenerate are left undefined with a reason. Throws
// Error("unresolved") if an item has no source or target record.
CorrelationGrid correlation_sweep(const DumpSet& dumps,
                                  const std::vector<SimilarityItem>& items,
                                  const std::vector<ReprType>& reprs,
                                  unsigned workers = 1);

}  // namespace phrprobe

#endif  // PHRPROBE_CORRELATION_H_
