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

#ifndef PHRPROBE_DATASET_H_
#define PHRPROBE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phrprobe {

// Lowercased, whitespace-split words.
using Phrase = std::vector<std::string>;

Phrase tokenize(std::string_view text);
std::string join(const Phrase& phrase);

struct SimilarityItem {
  std::string item_id;
  Phrase source;
  Phrase target;
  double score = 0.0;  // human similarity in [0, 1]

  bool operator==(const SimilarityItem&) const = default;
};

enum class Label { kNegative = 0, kPositive = 1 };
enum class Provenance { kPpdbPair, kSampledNegative };

struct ParaphraseItem {
  std::string item_id;
  Phrase source;
  Phrase target;
  Label label = Label::kNegative;
  Provenance provenance = Provenance::kPpdbPair;

  bool operator==(const ParaphraseItem&) const = default;
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double test_fraction = 0.25;
  bool stratified = true;
  // Keep all items of a source phrase on the same side of the split.
  bool group_by_source = false;
};

// --- BiRD ---------------------------------------------------------------

// Tab-separated rows. Headerless files are read as (source, target, score);
// a header row selects columns named term1/term2/source/target and the first
// column whose name contains "score". Blank lines and '#' lines are skipped.
std::vector<SimilarityItem> parse_bird(std::istream& in);
std::vector<SimilarityItem> load_bird(const std::filesystem::path& path);

// |multiset intersection| / max(|src|, |trg|). Throws on an empty phrase.
double word_overlap(const Phrase& source, const Phrase& target);

// Exactly-half overlap test done in integers, so 0.5 is never a rounding
// artifact.
bool has_half_overlap(const Phrase& source, const Phrase& target);

// Keeps items whose phrases are (w1 w2) / (w2 w1) with w1 != w2.
bool is_abba(const Phrase& source, const Phrase& target);
std::vector<SimilarityItem> filter_abba(const std::vector<SimilarityItem>& items);

// --- PPDB ---------------------------------------------------------------

struct PhrasePair {
  Phrase source;
  Phrase target;

  bool operator==(const PhrasePair&) const = default;
};

// Raw rows keep original casing and punctuation so cleanup can inspect them.
struct RawPair {
  std::string source;
  std::string target;
};

// Accepts PPDB 2.0 rows ("LHS ||| phrase ||| paraphrase ||| ...") and plain
// "source<TAB>target" rows.
std::vector<RawPair> parse_ppdb(std::istream& in);
std::vector<RawPair> load_ppdb(const std::filesystem::path& path);

enum class DropReason { kHyperlink, kNonAlphabetic, kAbbreviation, kTense };
std::string_view to_string(DropReason reason);

struct CleanResult {
  std::vector<PhrasePair> pairs;
  std::map<DropReason, std::size_t> dropped;
};

bool looks_like_url(std::string_view text);
// Strips one of -ing/-ed/-s from each word when at least three letters remain.
Phrase strip_inflection(const Phrase& phrase);
bool is_abbreviation_pair(const Phrase& a, const Phrase& b);
bool is_tense_pair(const Phrase& a, const Phrase& b);
// Returns the reason a pair would be dropped, if any.
std::optional<DropReason> drop_reason(const RawPair& pair);

CleanResult clean_ppdb(const std::vector<RawPair>& raw);

enum class NegativeConstraint {
  kAny,          // any pool phrase
  kHalfOverlap,  // pool phrases sharing exactly half their words with source
};

enum class ExhaustionPolicy { kError, kSkipSource };

struct ClassificationOptions {
  std::uint64_t seed = 0;
  NegativeConstraint negatives = NegativeConstraint::kAny;
  ExhaustionPolicy on_exhausted = ExhaustionPolicy::kError;
  // Only positives with exactly half overlap are used (controlled set).
  bool half_overlap_positives = false;
  // Cap on the number of output items; whole sources are kept or dropped.
  std::optional<std::size_t> target_size;
  std::string id_prefix = "ppdb";
};

struct ClassificationSet {
  std::vector<ParaphraseItem> items;
  std::size_t skipped_sources = 0;
};

// For every source with n positives attaches n seeded-random negatives from
// `pool`, never the source itself and never one of its known paraphrases.
// Throws Error("pool_exhausted") under ExhaustionPolicy::kError.
ClassificationSet build_classification_set(
    const std::vector<PhrasePair>& positives, const std::vector<Phrase>& pool,
    const ClassificationOptions& options);

// Retains items with overlap exactly 0.5 and rebalances each source to equal
// positive and negative counts, keeping the lowest item_ids.
std::vector<ParaphraseItem> filter_overlap_50(
    const std::vector<ParaphraseItem>& items);

// Throws Error("too_few_items") for fewer than four items.
std::pair<std::vector<ParaphraseItem>, std::vector<ParaphraseItem>>
split_train_test(const std::vector<ParaphraseItem>& items,
                 const SplitSpec& spec);

// Round-half-up of fraction * n.
std::size_t test_size_for(std::size_t n, double fraction);

// --- JSON-lines dataset files --------------------------------------------

void write_similarity_jsonl(const std::vector<SimilarityItem>& items,
                            std::string_view subset, std::ostream& out);
std::vector<SimilarityItem> read_similarity_jsonl(std::istream& in);

void write_paraphrase_jsonl(const std::vector<ParaphraseItem>& items,
                            std::string_view subset, std::ostream& out);
std::vector<ParaphraseItem> read_paraphrase_jsonl(std::istream& in);

std::vector<Phrase> read_phrase_pool(std::istream& in);

}  // namespace phrprobe

#endif  // PHRPROBE_DATASET_H_
