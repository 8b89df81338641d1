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

#ifndef PHRPROBE_REPORT_H_
#define PHRPROBE_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phrprobe/grid.h"

namespace phrprobe {

inline constexpr const char* kToolVersion = "0.1.0";

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// CSV columns:
//   correlation     layer,repr,n,r
//   classification  layer,repr,n_train,n_test,accuracy
//   landmark        layer,repr,fraction,n_decided,n_undecided
// Undefined cells leave the metric blank.
void write_csv(const CorrelationGrid& grid, std::ostream& out);
void write_csv(const AccuracyGrid& grid, std::ostream& out);
void write_csv(const LandmarkGrid& grid, std::ostream& out);

nlohmann::json to_json(const CorrelationGrid& grid);
nlohmann::json to_json(const AccuracyGrid& grid);
nlohmann::json to_json(const LandmarkGrid& grid);

// Fixed-precision rendering shared by every report.
std::string format_metric(double value);

// Any of the three grid CSVs reduced to (layer, repr, metric).
struct MetricRow {
  std::uint32_t layer = 0;
  std::string repr;
  std::optional<double> value;
};

struct MetricTable {
  std::string metric;  // "r", "accuracy" or "fraction"
  std::vector<MetricRow> rows;
};

MetricTable parse_metric_csv(std::istream& in);
MetricTable load_metric_csv(const std::filesystem::path& path);

struct DeltaRow {
  std::uint32_t layer = 0;
  std::string repr;
  std::optional<double> full;
  std::optional<double> controlled;
  std::optional<double> delta;  // full - controlled
};

struct MaxDrop {
  std::string repr;
  std::optional<double> drop;
  std::optional<std::uint32_t> layer;
};

struct DeltaTable {
  std::string metric;
  std::vector<DeltaRow> rows;
  std::vector<MaxDrop> max_drops;  // one per repr, in first-seen order
};

// Cell-wise full - controlled. Throws Error("shape_mismatch") unless both
// tables cover the same (layer, repr) cells with the same metric.
DeltaTable compare_grids(const MetricTable& full, const MetricTable& controlled);

// CSV: layer,repr,full,controlled,delta
void write_csv(const DeltaTable& table, std::ostream& out);
nlohmann::json to_json(const DeltaTable& table);

}  // namespace phrprobe

#endif  // PHRPROBE_REPORT_H_
