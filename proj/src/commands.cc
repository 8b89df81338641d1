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

#include "phrprobe/commands.h"

#include <fstream>
#include <ostream>
#include <sstream>

#include "phrprobe/correlation.h"
#include "phrprobe/dataset.h"
#include "phrprobe/dump_set.h"
#include "phrprobe/error.h"
#include "phrprobe/landmark.h"
#include "phrprobe/report.h"

namespace phrprobe {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return in;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
  if (!out) throw Error("io", "failed writing " + path.string());
}

json file_entry(const fs::path& path) {
  return {{"path", path.generic_string()}, {"sha256", sha256_file(path)}};
}

template <typename Grid>
void log_undefined(const Grid& grid, std::string_view analysis,
                   std::ostream& log) {
  for (std::uint32_t l = 0; l < grid.num_layers; ++l) {
    for (std::size_t r = 0; r < grid.reprs.size(); ++r) {
      const auto& c = grid.at(l, r);
      if (!c.value) {
        log << analysis << ": layer " << l << ' ' << to_string(grid.reprs[r])
            << " undefined: " << c.reason << '\n';
      }
    }
  }
  for (const auto& w : grid.warnings) log << analysis << ": " << w << '\n';
}

template <typename Grid>
json write_report(const RunConfig& config, const fs::path& dataset,
                  std::string_view analysis, const Grid& grid,
                  const json& extra) {
  std::ostringstream csv;
  write_csv(grid, csv);
  const fs::path csv_path = config.output_dir / (std::string(analysis) + ".csv");
  const fs::path json_path =
      config.output_dir / (std::string(analysis) + ".json");
  write_text(csv_path, csv.str());

  json dumps = json::array();
  for (const auto& d : config.dumps) dumps.push_back(file_entry(d));
  json report = {{"tool_version", kToolVersion},
                 {"analysis", analysis},
                 {"config", to_json(config)},
                 {"seed", config.seed},
                 {"subset", to_string(config.subset)},
                 {"inputs", {{"dumps", dumps}, {"dataset", file_entry(dataset)}}},
                 {"grid", to_json(grid)}};
  report.update(extra);
  write_text(json_path, report.dump(2) + "\n");
  return {{"csv", csv_path.generic_string()},
          {"json", json_path.generic_string()}};
}

}  // namespace

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::kFull: return "full";
    case Subset::kAbba: return "abba";
    case Subset::kOverlap50: return "overlap50";
  }
  return "?";
}

Subset parse_subset(std::string_view text) {
  if (text == "full") return Subset::kFull;
  if (text == "abba") return Subset::kAbba;
  if (text == "overlap50") return Subset::kOverlap50;
  throw Error("bad_subset", "unknown subset '" + std::string(text) + "'");
}

json to_json(const RunConfig& c) {
  json reprs = json::array();
  for (ReprType r : c.reprs) reprs.push_back(to_string(r));
  json dumps = json::array();
  for (const auto& d : c.dumps) dumps.push_back(d.generic_string());
  auto opt = [](const std::optional<fs::path>& p) {
    return p ? json(p->generic_string()) : json(nullptr);
  };
  return {{"dumps", dumps},
          {"similarity", opt(c.similarity)},
          {"paraphrase", opt(c.paraphrase)},
          {"landmarks", opt(c.landmarks)},
          {"subset", to_string(c.subset)},
          {"reprs", reprs},
          {"seed", c.seed},
          {"output_dir", c.output_dir.generic_string()},
          {"test_fraction", c.test_fraction},
          {"stratified", c.stratified},
          {"group_by_source", c.group_by_source},
          {"train",
           {{"seed", c.train.seed},
            {"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"learning_rate", c.train.learning_rate},
            {"beta1", c.train.beta1},
            {"beta2", c.train.beta2},
            {"epsilon", c.train.epsilon},
            {"hidden_units", c.train.hidden_units},
            {"standardize", c.train.standardize}}}};
}

void apply_json(const json& j, RunConfig& c) {
  try {
    if (j.contains("dumps")) {
      c.dumps.clear();
      for (const auto& d : j["dumps"]) c.dumps.emplace_back(d.get<std::string>());
    }
    for (auto [key, field] : {std::pair{"similarity", &c.similarity},
                              std::pair{"paraphrase", &c.paraphrase},
                              std::pair{"landmarks", &c.landmarks}}) {
      if (j.contains(key) && !j[key].is_null()) {
        *field = fs::path(j[key].get<std::string>());
      }
    }
    if (j.contains("subset")) c.subset = parse_subset(j["subset"].get<std::string>());
    if (j.contains("reprs")) {
      c.reprs.clear();
      for (const auto& r : j["reprs"]) c.reprs.push_back(parse_repr(r.get<std::string>()));
    }
    if (j.contains("seed")) {
      c.seed = j["seed"].get<std::uint64_t>();
      c.train.seed = c.seed;
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.stratified = j.value("stratified", c.stratified);
    c.group_by_source = j.value("group_by_source", c.group_by_source);
    c.workers = j.value("workers", c.workers);
    if (j.contains("train")) {
      const json& t = j["train"];
      c.train.seed = t.value("seed", c.train.seed);
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.beta1 = t.value("beta1", c.train.beta1);
      c.train.beta2 = t.value("beta2", c.train.beta2);
      c.train.epsilon = t.value("epsilon", c.train.epsilon);
      c.train.hidden_units = t.value("hidden_units", c.train.hidden_units);
      c.train.standardize = t.value("standardize", c.train.standardize);
    }
  } catch (const json::exception& e) {
    throw Error("bad_config", e.what());
  }
}

void apply_json(const json& j, BuildConfig& c) {
  try {
    for (auto [key, field] : {std::pair{"bird", &c.bird},
                              std::pair{"ppdb", &c.ppdb},
                              std::pair{"pool", &c.pool}}) {
      if (j.contains(key) && !j[key].is_null()) {
        *field = fs::path(j[key].get<std::string>());
      }
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("full_size")) c.full_size = j["full_size"].get<std::size_t>();
    if (j.contains("controlled_size")) {
      c.controlled_size = j["controlled_size"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw Error("bad_config", e.what());
  }
}

json cmd_build_dataset(const BuildConfig& config) {
  if (!config.bird && !config.ppdb) {
    throw Error("bad_config", "build-dataset needs --bird and/or --ppdb");
  }
  json stats = {{"tool_version", kToolVersion}, {"seed", config.seed}};
  // Everything is computed before the first write.
  std::vector<std::pair<std::string, std::string>> outputs;

  if (config.bird) {
    const auto items = load_bird(*config.bird);
    if (items.empty()) {
      throw Error("empty_input", config.bird->string() + " has no rows");
    }
    const auto abba = filter_abba(items);
    std::ostringstream full_out, abba_out;
    write_similarity_jsonl(items, "full", full_out);
    write_similarity_jsonl(abba, "abba", abba_out);
    outputs.emplace_back("bird_full.jsonl", full_out.str());
    outputs.emplace_back("bird_abba.jsonl", abba_out.str());
    stats["bird"] = {{"input", file_entry(*config.bird)},
                     {"full", items.size()},
                     {"abba", abba.size()}};
  }

  if (config.ppdb) {
    const auto raw = load_ppdb(*config.ppdb);
    if (raw.empty()) {
      throw Error("empty_input", config.ppdb->string() + " has no rows");
    }
    const CleanResult cleaned = clean_ppdb(raw);
    std::vector<Phrase> pool;
    if (config.pool) {
      auto in = open_input(*config.pool);
      pool = read_phrase_pool(in);
      if (pool.empty()) {
        throw Error("empty_input", config.pool->string() + " has no phrases");
      }
    } else {
      for (const auto& p : cleaned.pairs) {
        pool.push_back(p.source);
        pool.push_back(p.target);
      }
    }

    ClassificationOptions full_opts;
    full_opts.seed = config.seed;
    full_opts.on_exhausted = ExhaustionPolicy::kSkipSource;
    full_opts.target_size = config.full_size;
    const auto full = build_classification_set(cleaned.pairs, pool, full_opts);

    ClassificationOptions ctrl_opts = full_opts;
    ctrl_opts.negatives = NegativeConstraint::kHalfOverlap;
    ctrl_opts.half_overlap_positives = true;
    ctrl_opts.target_size = config.controlled_size;
    ctrl_opts.id_prefix = "ppdb50";
    const auto ctrl = build_classification_set(cleaned.pairs, pool, ctrl_opts);
    const auto overlap50 = filter_overlap_50(ctrl.items);

    std::ostringstream full_out, ctrl_out;
    write_paraphrase_jsonl(full.items, "full", full_out);
    write_paraphrase_jsonl(overlap50, "overlap50", ctrl_out);
    outputs.emplace_back("ppdb_full.jsonl", full_out.str());
    outputs.emplace_back("ppdb_overlap50.jsonl", ctrl_out.str());

    json dropped = json::object();
    for (const auto& [reason, count] : cleaned.dropped) {
      dropped[std::string(to_string(reason))] = count;
    }
    stats["ppdb"] = {{"input", file_entry(*config.ppdb)},
                     {"raw", raw.size()},
                     {"kept", cleaned.pairs.size()},
                     {"dropped", dropped},
                     {"pool_size", pool.size()},
                     {"full", full.items.size()},
                     {"full_skipped_sources", full.skipped_sources},
                     {"overlap50", overlap50.size()},
                     {"overlap50_skipped_sources", ctrl.skipped_sources}};
  }

  fs::create_directories(config.output_dir);
  for (const auto& [name, text] : outputs) {
    write_text(config.output_dir / name, text);
  }
  write_text(config.output_dir / "stats.json", stats.dump(2) + "\n");
  return stats;
}

json cmd_analyze(const RunConfig& config, std::ostream& log) {
  if (config.dumps.empty()) throw Error("bad_config", "analyze needs --dump");
  if (!config.similarity && !config.paraphrase && !config.landmarks) {
    throw Error("bad_config",
                "analyze needs --similarity, --paraphrase and/or --landmarks");
  }
  if (config.reprs.empty()) throw Error("bad_config", "no representations selected");
  for (const auto& p : config.dumps) {
    if (!fs::exists(p)) throw Error("io", "dump " + p.string() + " not found");
  }
  for (const auto* p : {&config.similarity, &config.paraphrase, &config.landmarks}) {
    if (*p && !fs::exists(**p)) {
      throw Error("io", "dataset " + (*p)->string() + " not found");
    }
  }

  DumpSet dumps;
  for (const auto& p : config.dumps) dumps.add(read_dump(p));
  fs::create_directories(config.output_dir);
  json written = json::object();

  if (config.similarity) {
    auto in = open_input(*config.similarity);
    auto items = read_similarity_jsonl(in);
    if (config.subset == Subset::kAbba) items = filter_abba(items);
    const auto grid = correlation_sweep(dumps, items, config.reprs, config.workers);
    log_undefined(grid, "correlation", log);
    written["correlation"] =
        write_report(config, *config.similarity, "correlation", grid,
                     {{"n_items", items.size()}});
  }

  if (config.paraphrase) {
    auto in = open_input(*config.paraphrase);
    auto items = read_paraphrase_jsonl(in);
    if (config.subset == Subset::kOverlap50) items = filter_overlap_50(items);
    SplitSpec split{config.seed, config.test_fraction, config.stratified,
                    config.group_by_source};
    const auto [train_items, test_items] = split_train_test(items, split);
    const auto grid = classification_sweep(dumps, train_items, test_items,
                                           config.reprs, config.train,
                                           config.workers);
    log_undefined(grid, "classification", log);
    written["classification"] =
        write_report(config, *config.paraphrase, "classification", grid,
                     {{"n_items", items.size()},
                      {"n_train", train_items.size()},
                      {"n_test", test_items.size()}});
  }

  if (config.landmarks) {
    auto items = load_landmark_items(*config.landmarks);
    const auto placeholders = std::erase_if(
        items, [](const LandmarkItem& it) { return it.placeholder; });
    if (placeholders > 0) {
      log << "landmark: skipped " << placeholders << " placeholder items\n";
    }
    const auto grid = landmark_eval(dumps, items, config.reprs, config.workers);
    log_undefined(grid, "landmark", log);
    written["landmark"] =
        write_report(config, *config.landmarks, "landmark", grid,
                     {{"n_items", items.size()},
                      {"skipped_placeholders", placeholders}});
  }
  return written;
}

json cmd_compare(const fs::path& full, const fs::path& controlled,
                 const fs::path& output_dir) {
  const DeltaTable table =
      compare_grids(load_metric_csv(full), load_metric_csv(controlled));
  fs::create_directories(output_dir);
  std::ostringstream csv;
  write_csv(table, csv);
  write_text(output_dir / "compare.csv", csv.str());
  json report = to_json(table);
  report["tool_version"] = kToolVersion;
  report["inputs"] = {{"full", file_entry(full)},
                      {"controlled", file_entry(controlled)}};
  write_text(output_dir / "compare.json", report.dump(2) + "\n");
  return report;
}

json cmd_validate_dump(const fs::path& dump) {
  json out = json::array();
  for (const Diagnostic& d : validate_dump_file(dump)) {
    json j = {{"code", d.code}, {"message", d.message}};
    if (d.record_id) j["record_id"] = *d.record_id;
    if (d.layer) j["layer"] = *d.layer;
    if (d.token) j["token"] = *d.token;
    if (d.dim) j["dim"] = *d.dim;
    if (d.offset) j["offset"] = *d.offset;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace phrprobe
