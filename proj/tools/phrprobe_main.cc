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

// phrprobe: layerwise phrase-representation analyses over embedding dumps.
//
//   phrprobe build-dataset --bird BiRD.txt --ppdb ppdb.txt --out data/
//   phrprobe analyze --dump phrases.bin --similarity data/bird_full.jsonl --out runs/full
//   phrprobe compare --full runs/full/correlation.csv --controlled runs/abba/correlation.csv --out runs/delta
//   phrprobe validate-dump phrases.bin

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phrprobe/commands.h"
#include "phrprobe/error.h"
#include "phrprobe/report.h"

namespace {

using json = nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw phrprobe::Error("io", "cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw phrprobe::Error("bad_config", path + ": " + e.what());
  }
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layerwise phrase-representation analysis"};
  app.set_version_flag("--version", std::string(phrprobe::kToolVersion));
  app.require_subcommand(1);

  // build-dataset
  auto* build = app.add_subcommand("build-dataset",
                                   "Build full and controlled dataset files");
  std::string build_config_path;
  std::string bird, ppdb, pool, build_out;
  std::uint64_t build_seed = 0;
  std::size_t full_size = 0, controlled_size = 0;
  build->add_option("--config", build_config_path, "JSON config file");
  build->add_option("--bird", bird, "BiRD tab-separated file");
  build->add_option("--ppdb", ppdb, "PPDB 2.0 rows");
  build->add_option("--pool", pool, "Negative phrase pool, one per line");
  build->add_option("--out", build_out, "Output directory");
  build->add_option("--seed", build_seed, "Sampling seed");
  build->add_option("--full-size", full_size, "Cap on full paraphrase items");
  build->add_option("--controlled-size", controlled_size,
                    "Cap on controlled paraphrase items");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Run layerwise analyses");
  std::string analyze_config_path;
  std::vector<std::string> dumps;
  std::string similarity, paraphrase, landmarks, subset, analyze_out;
  std::vector<std::string> reprs;
  std::uint64_t seed = 0;
  unsigned epochs = 0, batch_size = 0, hidden = 0, workers = 0;
  double learning_rate = 0.0, test_fraction = 0.0;
  bool standardize = false, no_stratify = false, group_by_source = false;
  analyze->add_option("--config", analyze_config_path, "JSON config file");
  analyze->add_option("--dump", dumps, "Embedding dump (repeatable)");
  analyze->add_option("--similarity", similarity, "Similarity items (.jsonl)");
  analyze->add_option("--paraphrase", paraphrase, "Paraphrase items (.jsonl)");
  analyze->add_option("--landmarks", landmarks, "Landmark items (.jsonl)");
  analyze->add_option("--subset", subset, "full | abba | overlap50")
      ->check(CLI::IsMember({"full", "abba", "overlap50"}));
  analyze->add_option("--repr", reprs, "CLS, HeadWord, AvgPhrase, AvgAll, SEP");
  analyze->add_option("--seed", seed, "Split and training seed");
  analyze->add_option("--out", analyze_out, "Output directory");
  analyze->add_option("--epochs", epochs, "Classifier epochs");
  analyze->add_option("--batch-size", batch_size, "Classifier batch size");
  analyze->add_option("--hidden", hidden, "Classifier hidden units");
  analyze->add_option("--lr", learning_rate, "Classifier learning rate");
  analyze->add_option("--test-fraction", test_fraction, "Held-out fraction");
  analyze->add_option("--workers", workers, "Worker threads");
  analyze->add_flag("--standardize", standardize,
                    "Standardize classifier features");
  analyze->add_flag("--no-stratify", no_stratify, "Plain random split");
  analyze->add_flag("--group-by-source", group_by_source,
                    "Keep each source phrase on one side of the split");

  // compare
  auto* compare = app.add_subcommand("compare", "Delta of two grids");
  std::string full_path, controlled_path, compare_out;
  compare->add_option("--full", full_path, "Grid CSV on the full set")->required();
  compare->add_option("--controlled", controlled_path,
                      "Grid CSV on the controlled set")->required();
  compare->add_option("--out", compare_out, "Output directory")->required();

  // validate-dump
  auto* validate = app.add_subcommand("validate-dump", "Check a dump file");
  std::string dump_path;
  validate->add_option("dump", dump_path, "Dump file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*build) {
      phrprobe::BuildConfig config;
      if (!build_config_path.empty()) {
        phrprobe::apply_json(load_json(build_config_path), config);
      }
      if (!bird.empty()) config.bird = bird;
      if (!ppdb.empty()) config.ppdb = ppdb;
      if (!pool.empty()) config.pool = pool;
      if (!build_out.empty()) config.output_dir = build_out;
      if (build->count("--seed")) config.seed = build_seed;
      if (build->count("--full-size")) config.full_size = full_size;
      if (build->count("--controlled-size")) {
        config.controlled_size = controlled_size;
      }
      if (config.output_dir.empty()) {
        throw phrprobe::Error("bad_config", "--out is required");
      }
      std::cout << phrprobe::cmd_build_dataset(config).dump(2) << std::endl;
    } else if (*analyze) {
      phrprobe::RunConfig config;
      if (!analyze_config_path.empty()) {
        phrprobe::apply_json(load_json(analyze_config_path), config);
      }
      if (!dumps.empty()) config.dumps.assign(dumps.begin(), dumps.end());
      if (!similarity.empty()) config.similarity = similarity;
      if (!paraphrase.empty()) config.paraphrase = paraphrase;
      if (!landmarks.empty()) config.landmarks = landmarks;
      if (!subset.empty()) config.subset = phrprobe::parse_subset(subset);
      if (!reprs.empty()) {
        config.reprs.clear();
        for (const auto& r : reprs) config.reprs.push_back(phrprobe::parse_repr(r));
      }
      if (analyze->count("--seed")) {
        config.seed = seed;
        config.train.seed = seed;
      }
      if (!analyze_out.empty()) config.output_dir = analyze_out;
      if (analyze->count("--epochs")) config.train.epochs = epochs;
      if (analyze->count("--batch-size")) config.train.batch_size = batch_size;
      if (analyze->count("--hidden")) config.train.hidden_units = hidden;
      if (analyze->count("--lr")) config.train.learning_rate = learning_rate;
      if (analyze->count("--test-fraction")) config.test_fraction = test_fraction;
      if (analyze->count("--workers")) config.workers = workers;
      if (standardize) config.train.standardize = true;
      if (no_stratify) config.stratified = false;
      if (group_by_source) config.group_by_source = true;
      if (config.output_dir.empty()) {
        throw phrprobe::Error("bad_config", "--out is required");
      }
      std::cout << phrprobe::cmd_analyze(config, std::cerr).dump(2) << std::endl;
    } else if (*compare) {
      const auto report =
          phrprobe::cmd_compare(full_path, controlled_path, compare_out);
      std::cout << report["max_drop"].dump(2) << std::endl;
    } else if (*validate) {
      const auto diagnostics = phrprobe::cmd_validate_dump(dump_path);
      std::cout << diagnostics.dump(2) << std::endl;
      if (!diagnostics.empty()) {
        return fail("invalid_dump", std::to_string(diagnostics.size()) +
                                        " diagnostics");
      }
    }
  } catch (const phrprobe::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
