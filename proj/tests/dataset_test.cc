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

#include "phrprobe/dataset.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "phrprobe/error.h"
#include "phrprobe/rng.h"

namespace phrprobe {
namespace {

std::vector<SimilarityItem> bird_from(const std::string& text) {
  std::istringstream in(text);
  return parse_bird(in);
}

Phrase P(std::string_view text) { return tokenize(text); }

TEST(Bird, ParsesHeaderlessRows) {
  const auto items = bird_from(
      "average person\tordinary citizen\t0.724\n"
      "adult female\tfemale adult\t0.812\n");
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].source, P("average person"));
  EXPECT_EQ(items[0].target, P("ordinary citizen"));
  EXPECT_DOUBLE_EQ(items[0].score, 0.724);
  EXPECT_DOUBLE_EQ(items[1].score, 0.812);
  EXPECT_NE(items[0].item_id, items[1].item_id);
}

TEST(Bird, HeaderSelectsColumns) {
  const auto items = bird_from(
      "pair\tterm1\tterm2\trelation\trelatedness score\n"
      "1\tLaw School\tschool law\tx\t0.382\n");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].source, P("law school"));
  EXPECT_DOUBLE_EQ(items[0].score, 0.382);
}

TEST(Bird, ScoreOutOfRangeNamesLine) {
  try {
    bird_from("a b\tc d\t0.5\n\na b\tc e\t1.2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Bird, MalformedRows) {
  EXPECT_THROW(bird_from("a b\tc d\n"), ParseError);
  EXPECT_THROW(bird_from("a b\tc d\tlots\n"), ParseError);
}

TEST(Bird, FixtureFile) {
  const auto items = load_bird(PHRPROBE_FIXTURE_DIR "/bird_mini.tsv");
  EXPECT_EQ(items.size(), 6u);
  EXPECT_EQ(filter_abba(items).size(), 4u);
}

TEST(Overlap, Examples) {
  EXPECT_DOUBLE_EQ(word_overlap(P("law school"), P("school law")), 1.0);
  EXPECT_DOUBLE_EQ(word_overlap(P("communication infrastructure"),
                                P("telecommunications infrastructure")),
                   0.5);
  EXPECT_DOUBLE_EQ(word_overlap(P("are crucial"), P("is absolutely vital")), 0.0);
  EXPECT_DOUBLE_EQ(word_overlap(P("the the cat"), P("the cat")), 2.0 / 3.0);
  EXPECT_THROW(word_overlap({}, P("a")), Error);
}

TEST(Overlap, SymmetricAndOneIffSameMultiset) {
  Rng rng(1);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  auto random_phrase = [&] {
    Phrase p(1 + rng.below(3));
    for (auto& w : p) w = vocab[rng.below(vocab.size())];
    return p;
  };
  for (int i = 0; i < 2000; ++i) {
    const Phrase a = random_phrase(), b = random_phrase();
    EXPECT_EQ(word_overlap(a, b), word_overlap(b, a));
    Phrase sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    EXPECT_EQ(word_overlap(a, b) == 1.0, sa == sb);
    EXPECT_EQ(has_half_overlap(a, b), word_overlap(a, b) == 0.5);
  }
}

TEST(Abba, Examples) {
  EXPECT_TRUE(is_abba(P("law school"), P("school law")));
  EXPECT_FALSE(is_abba(P("average person"), P("country")));
  EXPECT_FALSE(is_abba(P("bye bye"), P("bye bye")));
  EXPECT_FALSE(is_abba(P("a b c"), P("c b a")));
}

TEST(Abba, FilterIsSubsetAndIdempotent) {
  const auto items = load_bird(PHRPROBE_FIXTURE_DIR "/bird_mini.tsv");
  const auto once = filter_abba(items);
  EXPECT_EQ(filter_abba(once), once);
  for (const auto& it : once) {
    EXPECT_TRUE(is_abba(it.source, it.target));
    EXPECT_NE(std::find(items.begin(), items.end(), it), items.end());
  }
}

TEST(Ppdb, ParsesBothRowFormats) {
  std::istringstream in(
      "[NP] ||| a b ||| c d ||| score=1 ||| 0-0 ||| Equivalence\n"
      "e f\tg h\n");
  const auto rows = parse_ppdb(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].source, "a b");
  EXPECT_EQ(rows[0].target, "c d");
  EXPECT_EQ(rows[1].target, "g h");
}

TEST(Ppdb, DropRules) {
  EXPECT_EQ(drop_reason({"run fast", "http://x.com"}), DropReason::kHyperlink);
  EXPECT_EQ(drop_reason({"united nations", "un"}), DropReason::kAbbreviation);
  EXPECT_EQ(drop_reason({"dept of state", "department of state"}),
            DropReason::kAbbreviation);
  EXPECT_EQ(drop_reason({"walked home", "walking home"}), DropReason::kTense);
  EXPECT_EQ(drop_reason({"mr smith", "mr. smith"}), DropReason::kNonAlphabetic);
  EXPECT_EQ(drop_reason({"are crucial", "is absolutely vital"}), std::nullopt);
  EXPECT_EQ(drop_reason({"public service", "civil service"}), std::nullopt);
}

TEST(Ppdb, SuffixStripOracle) {
  EXPECT_EQ(join(strip_inflection(P("walked home"))), "walk home");
  EXPECT_EQ(join(strip_inflection(P("walking home"))), "walk home");
  EXPECT_EQ(join(strip_inflection(P("is was runs"))), "is was run");
}

TEST(Ppdb, FixtureCleanupCounts) {
  const auto raw = load_ppdb(PHRPROBE_FIXTURE_DIR "/ppdb_mini.txt");
  ASSERT_EQ(raw.size(), 20u);
  const auto result = clean_ppdb(raw);
  EXPECT_EQ(result.dropped.at(DropReason::kHyperlink), 4u);
  EXPECT_EQ(result.dropped.at(DropReason::kNonAlphabetic), 2u);
  EXPECT_EQ(result.dropped.at(DropReason::kAbbreviation), 2u);
  EXPECT_EQ(result.dropped.at(DropReason::kTense), 1u);
  EXPECT_EQ(result.pairs.size(), 11u);
}

std::vector<PhrasePair> crucial_positives() {
  return {{P("are crucial"), P("is absolutely vital")},
          {P("are crucial"), P("is an essential part")}};
}

std::vector<Phrase> crucial_pool() {
  return {P("are crucial"), P("is absolutely vital"), P("is an essential part"),
          P("was a matter of concern"), P("are exacerbating"),
          P("large house"), P("public service")};
}

TEST(Classification, EqualPositivesAndNegatives) {
  ClassificationOptions opts;
  opts.seed = 4;
  const auto set = build_classification_set(crucial_positives(), crucial_pool(), opts);
  ASSERT_EQ(set.items.size(), 4u);
  int pos = 0, neg = 0;
  for (const auto& it : set.items) {
    EXPECT_EQ(it.source, P("are crucial"));
    if (it.label == Label::kPositive) {
      ++pos;
    } else {
      ++neg;
      EXPECT_EQ(it.provenance, Provenance::kSampledNegative);
      EXPECT_NE(it.target, P("are crucial"));
      EXPECT_NE(it.target, P("is absolutely vital"));
      EXPECT_NE(it.target, P("is an essential part"));
    }
  }
  EXPECT_EQ(pos, 2);
  EXPECT_EQ(neg, 2);
}

TEST(Classification, DeterministicForSeed) {
  ClassificationOptions opts;
  opts.seed = 99;
  const auto a = build_classification_set(crucial_positives(), crucial_pool(), opts);
  const auto b = build_classification_set(crucial_positives(), crucial_pool(), opts);
  EXPECT_EQ(a.items, b.items);
}

TEST(Classification, PoolExhausted) {
  ClassificationOptions opts;
  EXPECT_THROW(build_classification_set(crucial_positives(), {P("are crucial")}, opts),
               Error);
  opts.on_exhausted = ExhaustionPolicy::kSkipSource;
  const auto set =
      build_classification_set(crucial_positives(), {P("are crucial")}, opts);
  EXPECT_TRUE(set.items.empty());
  EXPECT_EQ(set.skipped_sources, 1u);
}

TEST(Classification, BalancedPerSourceOnRandomInputs) {
  Rng rng(8);
  const std::vector<std::string> vocab = {"red", "blue", "car", "house", "tree",
                                          "big", "small", "old", "new", "dog"};
  auto phrase = [&] {
    Phrase p(1 + rng.below(3));
    for (auto& w : p) w = vocab[rng.below(vocab.size())];
    return p;
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PhrasePair> pos;
    std::vector<Phrase> pool;
    for (int i = 0; i < 30; ++i) {
      pos.push_back({phrase(), phrase()});
      pool.push_back(pos.back().source);
      pool.push_back(pos.back().target);
    }
    for (int i = 0; i < 100; ++i) pool.push_back(phrase());
    ClassificationOptions opts;
    opts.seed = trial;
    opts.on_exhausted = ExhaustionPolicy::kSkipSource;
    const auto set = build_classification_set(pos, pool, opts);
    std::map<std::string, std::pair<int, int>> counts;
    std::set<std::string> ids;
    for (const auto& it : set.items) {
      auto& c = counts[join(it.source)];
      (it.label == Label::kPositive ? c.first : c.second)++;
      EXPECT_TRUE(ids.insert(it.item_id).second);
    }
    for (const auto& [src, c] : counts) EXPECT_EQ(c.first, c.second) << src;
  }
}

TEST(Classification, HalfOverlapNegatives) {
  const std::vector<PhrasePair> pos = {
      {P("communication infrastructure"), P("telecommunications infrastructure")},
      {P("communication infrastructure"), P("network systems")}};
  const std::vector<Phrase> pool = {P("data infrastructure"), P("road infrastructure"),
                                    P("big house"), P("communication theory")};
  ClassificationOptions opts;
  opts.negatives = NegativeConstraint::kHalfOverlap;
  opts.half_overlap_positives = true;
  const auto set = build_classification_set(pos, pool, opts);
  ASSERT_EQ(set.items.size(), 2u);
  for (const auto& it : set.items) {
    EXPECT_TRUE(has_half_overlap(it.source, it.target));
  }
}

TEST(Classification, TargetSizeKeepsWholeSources) {
  std::vector<PhrasePair> pos;
  std::vector<Phrase> pool;
  for (int s = 0; s < 10; ++s) {
    for (int k = 0; k < 3; ++k) {
      pos.push_back({P("src" + std::to_string(s) + " x"),
                     P("trg" + std::to_string(s) + std::to_string(k))});
    }
  }
  for (int i = 0; i < 50; ++i) pool.push_back(P("pool" + std::to_string(i)));
  ClassificationOptions opts;
  opts.target_size = 20;
  const auto set = build_classification_set(pos, pool, opts);
  EXPECT_EQ(set.items.size(), 18u);
}

ParaphraseItem item(std::string id, std::string_view src, std::string_view trg,
                    Label label) {
  return {std::move(id), P(src), P(trg), label,
          label == Label::kPositive ? Provenance::kPpdbPair
                                    : Provenance::kSampledNegative};
}

TEST(Overlap50, CuratedExamples) {
  const std::vector<ParaphraseItem> items = {
      item("p-000000", "communication infrastructure",
           "telecommunications infrastructure", Label::kPositive),
      item("p-000001", "communication infrastructure", "data infrastructure",
           Label::kNegative),
      item("p-000002", "are crucial", "is absolutely vital", Label::kPositive),
      item("p-000003", "are crucial", "are exacerbating", Label::kNegative)};
  const auto out = filter_overlap_50(items);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].item_id, "p-000000");
  EXPECT_EQ(out[1].item_id, "p-000001");
}

TEST(Overlap50, RebalancesByLowestItemId) {
  const std::vector<ParaphraseItem> items = {
      item("p-000005", "a b", "a c", Label::kPositive),
      item("p-000002", "a b", "a d", Label::kPositive),
      item("p-000003", "a b", "b e", Label::kNegative),
      item("p-000004", "x y", "x z", Label::kPositive)};
  const auto out = filter_overlap_50(items);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].item_id, "p-000002");
  EXPECT_EQ(out[1].item_id, "p-000003");
}

std::vector<ParaphraseItem> balanced_items(std::size_t n) {
  std::vector<ParaphraseItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(item("i-" + std::to_string(i), "s" + std::to_string(i / 4) + " w",
                         "t" + std::to_string(i),
                         i % 2 ? Label::kPositive : Label::kNegative));
  }
  return items;
}

TEST(Split, StratifiedQuarter) {
  const auto items = balanced_items(100);
  const auto [train, test] = split_train_test(items, {7, 0.25});
  ASSERT_EQ(train.size(), 75u);
  ASSERT_EQ(test.size(), 25u);
  const auto pos = std::count_if(test.begin(), test.end(), [](const auto& it) {
    return it.label == Label::kPositive;
  });
  // 12.5 positives expected; stratification rounds to 12 or 13.
  EXPECT_TRUE(pos == 12 || pos == 13);
}

TEST(Split, DeterministicDisjointExhaustive) {
  const auto items = balanced_items(60);
  const auto a = split_train_test(items, {3, 0.25});
  const auto b = split_train_test(items, {3, 0.25});
  EXPECT_EQ(a, b);
  std::multiset<std::string> ids;
  for (const auto& it : a.first) ids.insert(it.item_id);
  for (const auto& it : a.second) ids.insert(it.item_id);
  EXPECT_EQ(ids.size(), items.size());
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), items.size());
}

TEST(Split, LabelRatioWithinTwoPercent) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 200 + rng.below(800);
    std::vector<ParaphraseItem> items;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back(item("i-" + std::to_string(i), "s w", "t",
                           rng.uniform() < 0.3 ? Label::kPositive : Label::kNegative));
    }
    const auto [train, test] = split_train_test(items, {rng.next(), 0.25});
    auto ratio = [](const std::vector<ParaphraseItem>& v) {
      return static_cast<double>(std::count_if(v.begin(), v.end(), [](const auto& it) {
               return it.label == Label::kPositive;
             })) / static_cast<double>(v.size());
    };
    EXPECT_EQ(test.size(), test_size_for(n, 0.25));
    EXPECT_NEAR(ratio(test), ratio(items), 0.02);
  }
}

TEST(Split, RoundHalfUp) {
  EXPECT_EQ(test_size_for(11770, 0.25), 2943u);
  EXPECT_EQ(test_size_for(13050, 0.25), 3263u);
  EXPECT_EQ(test_size_for(10, 0.25), 3u);
}

TEST(Split, TooFewItems) {
  EXPECT_THROW(split_train_test(balanced_items(3), {0, 0.25}), Error);
  EXPECT_THROW(split_train_test(balanced_items(8), {0, 1.0}), Error);
}

TEST(Split, GroupBySourceKeepsSourcesTogether) {
  const auto items = balanced_items(80);
  SplitSpec spec{5, 0.25, true, true};
  const auto [train, test] = split_train_test(items, spec);
  std::set<std::string> train_sources;
  for (const auto& it : train) train_sources.insert(join(it.source));
  for (const auto& it : test) EXPECT_FALSE(train_sources.contains(join(it.source)));
  EXPECT_GE(test.size(), 20u);
}

TEST(Jsonl, RoundTrip) {
  const auto sim = load_bird(PHRPROBE_FIXTURE_DIR "/bird_mini.tsv");
  std::stringstream s1;
  write_similarity_jsonl(sim, "full", s1);
  EXPECT_EQ(read_similarity_jsonl(s1), sim);

  ClassificationOptions opts;
  const auto para = build_classification_set(crucial_positives(), crucial_pool(), opts);
  std::stringstream s2;
  write_paraphrase_jsonl(para.items, "full", s2);
  const std::string first_line = s2.str().substr(0, s2.str().find('\n'));
  EXPECT_NE(first_line.find("\"subset\":\"full\""), std::string::npos);
  EXPECT_EQ(read_paraphrase_jsonl(s2), para.items);
}

}  // namespace
}  // namespace phrprobe
