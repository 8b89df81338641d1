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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. With --allow-missing-data, criteria that fail only
// because an external corpus is absent still print FAIL but do not affect
// the exit status.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "phrprobe/classifier.h"
#include "phrprobe/commands.h"
#include "phrprobe/correlation.h"
#include "phrprobe/dataset.h"
#include "phrprobe/embedding_store.h"
#include "phrprobe/error.h"
#include "phrprobe/landmark.h"
#include "phrprobe/pooling.h"
#include "phrprobe/report.h"
#include "phrprobe/rng.h"
#include "test_util.h"

namespace phrprobe {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
  bool missing_data = false;
};

std::string bytes_of(const Dump& d) {
  std::ostringstream out;
  write_dump_binary(d, out);
  return out.str();
}

Outcome format_round_trip() {
  Rng rng(2024);
  testing::TempDir dir;
  std::size_t identical = 0, truncations = 0, nans = 0, missed = 0;
  for (int i = 0; i < 1000; ++i) {
    const Dump d = testing::random_dump(rng, 8);
    const std::string first = bytes_of(d);
    Dump back;
    std::istringstream in(first);
    read_dump_binary(in, back);
    back.manifest = d.manifest;
    if (bytes_of(back) == first && back == d) ++identical;

    // Truncate at a random byte and validate from disk.
    const auto cut = dir / "cut.bin";
    {
      std::ofstream out(cut, std::ios::binary | std::ios::trunc);
      out << first.substr(0, rng.below(first.size()));
    }
    {
      std::ofstream m(manifest_path_for(cut), std::ios::trunc);
      write_manifest(d.manifest, m);
    }
    ++truncations;
    if (validate_dump_file(cut).empty()) ++missed;

    if (!d.records.empty()) {
      Dump bad = d;
      auto& rec = bad.records[rng.below(bad.records.size())];
      rec.data[rng.below(rec.data.size())] = std::nanf("");
      ++nans;
      bool found = false;
      for (const auto& diag : validate_dump(bad)) found |= diag.code == "non_finite";
      if (!found) ++missed;
    }
  }
  Outcome o;
  o.pass = identical == 1000 && missed == 0;
  o.detail = std::to_string(identical) + "/1000 byte-identical; " +
             std::to_string(truncations) + " truncations + " + std::to_string(nans) +
             " NaN injections, " + std::to_string(missed) + " missed";
  return o;
}

Outcome pooling_oracle() {
  Rng rng(77);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto layers = 1 + static_cast<std::uint32_t>(rng.below(6));
    const auto dim = 1 + static_cast<std::uint32_t>(rng.below(32));
    SequenceRecord r = testing::random_record(rng, i, layers, dim, 16);
    const auto layer = static_cast<std::uint32_t>(rng.below(layers));
    const ReprType repr = kAllReprs[rng.below(kAllReprs.size())];
    if (repr == ReprType::kCls) r.cls_pos = 0;
    if (repr == ReprType::kSep) r.sep_pos = static_cast<std::int32_t>(r.num_tokens - 1);
    std::optional<TokenSpan> head;
    if (repr == ReprType::kHeadWord && rng.below(2) == 0) {
      head = TokenSpan{r.span.start + static_cast<std::uint32_t>(
                                          rng.below(r.span.length())),
                       r.span.end};
    }
    std::uint32_t first = 0, last = 0;
    switch (repr) {
      case ReprType::kCls: first = last = static_cast<std::uint32_t>(r.cls_pos); break;
      case ReprType::kSep: first = last = static_cast<std::uint32_t>(r.sep_pos); break;
      case ReprType::kHeadWord:
        first = head ? head->start : r.span.end;
        last = r.span.end;
        break;
      case ReprType::kAvgPhrase: first = r.span.start; last = r.span.end; break;
      case ReprType::kAvgAll: first = 0; last = r.num_tokens - 1; break;
    }
    const auto got = pool(r, layer, repr, head).values;
    for (std::uint32_t d = 0; d < dim; ++d) {
      double want = 0.0;
      for (std::uint32_t t = first; t <= last; ++t) {
        want += r.data[(std::size_t{layer} * r.num_tokens + t) * dim + d];
      }
      want /= (last - first + 1);
      worst = std::max(worst, std::abs(got[d] - want) / std::max(1.0, std::abs(want)));
    }
  }
  return {worst <= 1e-5, "10000 samples, max relative error " + format_metric(worst)};
}

Outcome statistics_oracles() {
  Rng rng(31);
  double worst_r = 0.0, worst_cos = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<double> x(n), y(n);
    std::vector<float> u(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = rng.normal();
      y[k] = rng.uniform() * x[k] + rng.normal();
      u[k] = static_cast<float>(rng.normal());
      v[k] = static_cast<float>(rng.normal());
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
      mx += x[k] / n;
      my += y[k] / n;
    }
    double sxy = 0, sxx = 0, syy = 0, uv = 0, uu = 0, vv = 0;
    for (std::size_t k = 0; k < n; ++k) {
      sxy += (x[k] - mx) * (y[k] - my);
      sxx += (x[k] - mx) * (x[k] - mx);
      syy += (y[k] - my) * (y[k] - my);
      uv += double{u[k]} * v[k];
      uu += double{u[k]} * u[k];
      vv += double{v[k]} * v[k];
    }
    worst_r = std::max(worst_r, std::abs(*pearson(x, y) - sxy / std::sqrt(sxx * syy)));
    worst_cos = std::max(worst_cos, std::abs(cosine(u, v) - uv / std::sqrt(uu * vv)));
  }
  std::vector<double> xs(1000), ys(1000);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = rng.normal();
    ys[k] = 2 * xs[k] + 1;
  }
  const double linear = std::abs(*pearson(xs, ys) - 1.0);
  std::ostringstream s;
  s << "pearson max err " << worst_r << ", cosine max err " << worst_cos
    << ", |r(2x+1) - 1| = " << linear;
  return {worst_r <= 1e-9 && worst_cos <= 1e-9 && linear <= 1e-12, s.str()};
}

fs::path bird_path() {
  if (const char* env = std::getenv("PHRPROBE_BIRD")) return env;
  return fs::path(PHRPROBE_DATA_DIR) / "BiRD.txt";
}

Outcome filter_invariants() {
  // Overlap-50 invariants on generated classification sets.
  Rng rng(5);
  const std::vector<std::string> vocab = {"data", "road", "city", "water", "power",
                                          "line", "plan", "house", "public", "service"};
  std::size_t checked = 0, violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PhrasePair> pos;
    std::vector<Phrase> pool;
    auto phrase = [&] {
      Phrase p(1 + rng.below(3));
      for (auto& w : p) w = vocab[rng.below(vocab.size())];
      return p;
    };
    for (int i = 0; i < 40; ++i) pos.push_back({phrase(), phrase()});
    for (int i = 0; i < 200; ++i) pool.push_back(phrase());
    ClassificationOptions opts;
    opts.seed = trial;
    opts.on_exhausted = ExhaustionPolicy::kSkipSource;
    if (trial % 2) {
      opts.negatives = NegativeConstraint::kHalfOverlap;
      opts.half_overlap_positives = true;
    }
    const auto out = filter_overlap_50(build_classification_set(pos, pool, opts).items);
    std::map<std::string, int> balance;
    for (const auto& it : out) {
      ++checked;
      if (!has_half_overlap(it.source, it.target)) ++violations;
      balance[join(it.source)] += it.label == Label::kPositive ? 1 : -1;
    }
    for (const auto& [src, b] : balance) violations += b != 0;
  }
  std::string detail = "overlap50: " + std::to_string(checked) + " items, " +
                       std::to_string(violations) + " violations";
  const bool overlap_ok = violations == 0 && checked > 0;

  const fs::path bird = bird_path();
  if (!fs::exists(bird)) {
    return {false, detail + "; BiRD file not found at " + bird.string() +
                       " so the 410 AB-BA count cannot be checked",
            overlap_ok};
  }
  const auto abba = filter_abba(load_bird(bird)).size();
  detail += "; filter_abba on " + bird.filename().string() + " -> " +
            std::to_string(abba) + " (expected 410)";
  return {overlap_ok && abba == 410, detail};
}

FeatureSet blobs(Rng& rng, std::size_t n, bool shuffled) {
  FeatureSet f;
  f.inputs.resize(16, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 1;
    for (Eigen::Index d = 0; d < 16; ++d) {
      f.inputs(d, static_cast<Eigen::Index>(i)) = rng.normal() + (pos ? 1.0 : -1.0);
    }
    f.labels.push_back(pos ? Label::kPositive : Label::kNegative);
  }
  if (shuffled) rng.shuffle(f.labels);
  return f;
}

Outcome classifier_sanity() {
  Rng rng(99);
  TrainConfig cfg;
  cfg.seed = 1;
  cfg.epochs = 20;
  const auto train_set = blobs(rng, 2000, false);
  const auto test_set = blobs(rng, 1000, false);
  const double acc = evaluate_features(train_features(train_set, cfg), test_set);

  const auto null_train = blobs(rng, 2000, true);
  const auto null_test = blobs(rng, 2000, true);
  const double null_acc = evaluate_features(train_features(null_train, cfg), null_test);

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto m = init_model(32, 64, 100 + i);
    std::vector<double> x(32);
    for (auto& v : x) v = rng.normal();
    worst = std::max(worst, gradient_check(m, x, i % 2 ? Label::kPositive
                                                       : Label::kNegative,
                                           backprop, 128, i));
  }
  std::ostringstream s;
  s << "blob accuracy " << acc << ", shuffled-label accuracy " << null_acc
    << ", gradient check max rel err " << worst;
  return {acc >= 0.99 && null_acc >= 0.45 && null_acc <= 0.55 && worst < 1e-6,
          s.str()};
}

// Records for (source, target) with a given AvgPhrase cosine in `dims`
// dimensions; the phrase span holds the controlled vectors, CLS and SEP are
// noise.
void add_pair(Dump& d, Rng& rng, const SimilarityItem& item, double cos_value) {
  const std::uint32_t dim = d.header.hidden_dim;
  const double sin_value = std::sqrt(std::max(0.0, 1.0 - cos_value * cos_value));
  for (int role = 0; role < 2; ++role) {
    SequenceRecord r;
    r.record_id = d.records.size();
    r.num_layers = d.header.num_layers;
    r.hidden_dim = dim;
    r.num_tokens = 4;
    r.span = {1, 2};
    r.cls_pos = 0;
    r.sep_pos = 3;
    for (std::uint32_t l = 0; l < r.num_layers; ++l) {
      for (std::uint32_t t = 0; t < r.num_tokens; ++t) {
        for (std::uint32_t k = 0; k < dim; ++k) {
          double v = rng.normal();
          if (t == 1 || t == 2) {
            v = k == 0 ? (role == 0 ? 1.0 : cos_value)
                : k == 1 ? (role == 0 ? 0.0 : sin_value)
                         : 0.0;
          }
          r.data.push_back(static_cast<float>(v));
        }
      }
    }
    d.records.push_back(std::move(r));
    d.manifest.push_back({d.records.back().record_id, item.item_id,
                          role ? RecordRole::kTarget : RecordRole::kSource,
                          join(role ? item.target : item.source),
                          ContextMode::kPhraseOnly, std::nullopt});
  }
}

std::optional<double> avg_phrase_r(const fs::path& csv) {
  const auto table = load_metric_csv(csv);
  for (const auto& row : table.rows) {
    if (row.layer == 0 && row.repr == "AvgPhrase") return row.value;
  }
  return std::nullopt;
}

Outcome end_to_end_contrast() {
  // Non-AB-BA items: cosine is a linear function of the score. AB-BA items:
  // same-word pairs whose cosine comes from an independent draw, so it says
  // nothing about their score. Their scores sit near the middle of the range
  // so they do not drag down the full-set correlation.
  Rng rng(4242);
  Dump dump;
  dump.header.hidden_dim = 6;
  dump.header.num_layers = 2;
  std::vector<SimilarityItem> items;
  for (int i = 0; i < 3000; ++i) {
    const bool abba = i % 10 == 0;
    const std::string a = "a" + std::to_string(i), b = "b" + std::to_string(i);
    SimilarityItem item{"syn-" + std::to_string(i), {a, b},
                        abba ? Phrase{b, a} : Phrase{"c" + std::to_string(i), b}, 0.0};
    double cos_value = 0.0;
    if (abba) {
      item.score = 0.45 + 0.1 * rng.uniform();
      cos_value = 0.2 + 0.7 * (0.45 + 0.1 * rng.uniform());
    } else {
      item.score = rng.uniform();
      cos_value = 0.2 + 0.7 * item.score + 0.003 * rng.normal();
    }
    add_pair(dump, rng, item, cos_value);
    items.push_back(std::move(item));
  }
  dump.header.num_records = dump.records.size();

  testing::TempDir dir;
  write_dump(dump, dir / "synthetic.bin");
  {
    std::ofstream out(dir / "items.jsonl");
    write_similarity_jsonl(items, "full", out);
  }
  RunConfig config;
  config.dumps = {dir / "synthetic.bin"};
  config.similarity = dir / "items.jsonl";
  config.reprs = {ReprType::kAvgPhrase, ReprType::kCls};
  std::ostringstream log;
  config.output_dir = dir / "full";
  cmd_analyze(config, log);
  config.subset = Subset::kAbba;
  config.output_dir = dir / "abba";
  cmd_analyze(config, log);

  const auto full = avg_phrase_r(dir / "full" / "correlation.csv");
  const auto abba = avg_phrase_r(dir / "abba" / "correlation.csv");
  std::ostringstream s;
  s << "AvgPhrase r: full " << (full ? format_metric(*full) : "undefined")
    << ", AB-BA " << (abba ? format_metric(*abba) : "undefined");
  return {full && abba && *full > 0.99 && std::abs(*abba) < 0.1, s.str()};
}

template <typename Fn>
Dump landmark_dump(const std::vector<LandmarkItem>& items, std::uint32_t layers,
                   std::uint32_t dim, Fn fill) {
  Dump d;
  d.header.hidden_dim = dim;
  d.header.num_layers = layers;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (int kind = 0; kind < 3; ++kind) {
      SequenceRecord r;
      r.record_id = d.records.size();
      r.num_layers = layers;
      r.hidden_dim = dim;
      r.num_tokens = 3;
      r.span = {1, 1};
      r.cls_pos = 0;
      r.sep_pos = 2;
      r.data.resize(std::size_t{layers} * 3 * dim);
      fill(kind, r.data);
      d.records.push_back(std::move(r));
      d.manifest.push_back({d.records.back().record_id, items[i].item_id,
                            kind == 0 ? RecordRole::kLandmarkPhrase
                                      : RecordRole::kLandmarkWord,
                            kind == 0   ? join(items[i].phrase)
                            : kind == 1 ? items[i].positive
                                        : items[i].negative,
                            ContextMode::kPhraseOnly, std::nullopt});
    }
    // Phrase copies the positive landmark.
    d.records[3 * i].data = d.records[3 * i + 1].data;
  }
  d.header.num_records = d.records.size();
  return d;
}

Outcome landmark_properties() {
  const auto items = load_landmark_items(fs::path(PHRPROBE_DATA_DIR) / "landmarks.jsonl");
  const std::vector<ReprType> reprs(kAllReprs.begin(), kAllReprs.end());
  Rng rng(8);

  DumpSet equal;
  equal.add(landmark_dump(items, 6, 12, [&](int, std::vector<float>& data) {
    for (auto& v : data) v = static_cast<float>(rng.normal());
  }));
  const auto grid = landmark_eval(equal, items, reprs);
  std::size_t perfect = 0;
  for (const auto& c : grid.cells) perfect += c.value && *c.value == 1.0;

  DumpSet constant;
  Dump c = landmark_dump(items, 6, 12, [](int, std::vector<float>& data) {
    std::fill(data.begin(), data.end(), 0.5f);
  });
  constant.add(std::move(c));
  const auto flat = landmark_eval(constant, items, reprs);
  std::ostringstream csv;
  write_csv(flat, csv);
  std::size_t missing = 0;
  for (const auto& cell : flat.cells) missing += !cell.value && !cell.reason.empty();
  const auto row_count = grid.cells.size();
  const bool csv_blank = csv.str().find(",0.") == std::string::npos &&
                         csv.str().find(",1.") == std::string::npos;

  std::ostringstream s;
  s << perfect << "/" << row_count << " cells at 100% (" << items.size()
    << " items); constant dump: " << missing << "/" << flat.cells.size()
    << " cells reported missing";
  return {perfect == row_count && missing == flat.cells.size() && csv_blank, s.str()};
}

}  // namespace
}  // namespace phrprobe

int main(int argc, char** argv) {
  bool allow_missing = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--allow-missing-data") == 0) allow_missing = true;
  }
  const std::vector<std::pair<const char*, std::function<phrprobe::Outcome()>>> checks =
      {{"format_round_trip", phrprobe::format_round_trip},
       {"pooling_oracle", phrprobe::pooling_oracle},
       {"pearson_cosine_oracles", phrprobe::statistics_oracles},
       {"filter_invariants", phrprobe::filter_invariants},
       {"classifier_sanity", phrprobe::classifier_sanity},
       {"end_to_end_synthetic_contrast", phrprobe::end_to_end_contrast},
       {"landmark_properties", phrprobe::landmark_properties}};
  int hard_failures = 0;
  for (const auto& [name, fn] : checks) {
    const auto start = std::chrono::steady_clock::now();
    phrprobe::Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " ["
              << std::fixed;
    std::cout.precision(1);
    std::cout << secs << "s]" << std::endl;
    std::cout.unsetf(std::ios::fixed);
    std::cout.precision(6);
    if (!o.pass && !(allow_missing && o.missing_data)) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
