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

#ifndef PHRPROBE_COMMANDS_H_
#define PHRPROBE_COMMANDS_H_

// End-to-end runs behind the `phrprobe` subcommands.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phrprobe/classifier.h"
#include "phrprobe/embedding_store.h"
#include "phrprobe/pooling.h"

namespace phrprobe {

enum class Subset { kFull, kAbba, kOverlap50 };
std::string_view to_string(Subset subset);
Subset parse_subset(std::string_view text);

struct BuildConfig {
  std::optional<std::filesystem::path> bird;
  std::optional<std::filesystem::path> ppdb;
  // One phrase per line; defaults to every phrase of the cleaned PPDB.
  std::optional<std::filesystem::path> pool;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::optional<std::size_t> full_size;
  std::optional<std::size_t> controlled_size;
};

struct RunConfig {
  std::vector<std::filesystem::path> dumps;
  std::optional<std::filesystem::path> similarity;
  std::optional<std::filesystem::path> paraphrase;
  std::optional<std::filesystem::path> landmarks;
  Subset subset = Subset::kFull;
  std::vector<ReprType> reprs{kAllReprs.begin(), kAllReprs.end()};
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  TrainConfig train;
  double test_fraction = 0.25;
  bool stratified = true;
  bool group_by_source = false;
  unsigned workers = 1;
};

nlohmann::json to_json(const RunConfig& config);
// Fills fields present in `j`; absent keys keep their current values.
void apply_json(const nlohmann::json& j, RunConfig& config);
void apply_json(const nlohmann::json& j, BuildConfig& config);

// Writes bird_full.jsonl, bird_abba.jsonl, ppdb_full.jsonl,
// ppdb_overlap50.jsonl (for the inputs given) and stats.json. Nothing is
// written if any input fails to load or is empty. Returns the stats block.
nlohmann::json cmd_build_dataset(const BuildConfig& config);

// Writes correlation/classification/landmark .csv and .json for each dataset
// named in the config. Human-readable notes (undefined cells, skipped
// placeholders) go to `log`. Returns a summary of files written.
nlohmann::json cmd_analyze(const RunConfig& config, std::ostream& log);

// Writes compare.csv and compare.json into `output_dir`.
nlohmann::json cmd_compare(const std::filesystem::path& full,
                           const std::filesystem::path& controlled,
                           const std::filesystem::path& output_dir);

// Diagnostics as JSON, one object per problem; empty array when valid.
nlohmann::json cmd_validate_dump(const std::filesystem::path& dump);

}  // namespace phrprobe

#endif  // PHRPROBE_COMMANDS_H_
