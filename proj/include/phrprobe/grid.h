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

#ifndef PHRPROBE_GRID_H_
#define PHRPROBE_GRID_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phrprobe/pooling.h"

namespace phrprobe {

// Metric per (layer x representation) cell, row-major by layer. An empty
// `value` marks an undefined cell; `reason` says why.
template <typename Extra>
struct LayerGrid {
  struct Cell {
    std::optional<double> value;
    Extra extra{};
    std::string reason;
  };

  std::uint32_t num_layers = 0;
  std::vector<ReprType> reprs;
  std::vector<Cell> cells;
  std::vector<std::string> warnings;

  static LayerGrid make(std::uint32_t layers, std::vector<ReprType> reprs) {
    LayerGrid g;
    g.num_layers = layers;
    g.reprs = std::move(reprs);
    g.cells.resize(std::size_t{layers} * g.reprs.size());
    return g;
  }

  Cell& at(std::uint32_t layer, std::size_t repr_index) {
    return cells[std::size_t{layer} * reprs.size() + repr_index];
  }
  const Cell& at(std::uint32_t layer, std::size_t repr_index) const {
    return cells[std::size_t{layer} * reprs.size() + repr_index];
  }
};

struct CorrelationExtra {
  std::size_t n = 0;
};

struct AccuracyExtra {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double final_train_loss = 0.0;
};

struct LandmarkExtra {
  std::size_t n_decided = 0;
  std::size_t n_undecided = 0;
};

using CorrelationGrid = LayerGrid<CorrelationExtra>;
using AccuracyGrid = LayerGrid<AccuracyExtra>;
using LandmarkGrid = LayerGrid<LandmarkExtra>;

}  // namespace phrprobe

#endif  // PHRPROBE_GRID_H_
