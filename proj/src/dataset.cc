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
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "phrprobe/error.h"
#include "phrprobe/rng.h"

namespace phrprobe {
namespace {

using json = nlohmann::json;

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + sep.size();
  }
}

std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    return std::nullopt;
  }
  return value;
}

std::size_t multiset_intersection(const Phrase& a, const Phrase& b) {
  std::unordered_map<std::string, int> counts;
  for (const auto& w : a) ++counts[w];
  std::size_t shared = 0;
  for (const auto& w : b) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++shared;
    }
  }
  return shared;
}

// "dept" / "department": same first and last letter, letters in order.
bool contracts(const std::string& s, const std::string& l) {
  if (s.size() < 2 || s.size() >= l.size()) return false;
  if (l.starts_with(s)) return true;
  if (s.front() != l.front() || s.back() != l.back()) return false;
  std::size_t j = 0;
  for (char c : l) {
    if (j < s.size() && c == s[j]) ++j;
  }
  return j == s.size();
}

// `short_form` abbreviates `long_form` by initials or word-wise truncation.
bool abbreviates(const Phrase& short_form, const Phrase& long_form) {
  if (short_form.size() == 1 && long_form.size() >= 2) {
    std::string initials;
    for (const auto& w : long_form) initials += w.front();
    if (short_form.front() == initials) return true;
  }
  if (short_form.size() != long_form.size() || short_form == long_form) {
    return false;
  }
  bool truncated = false;
  for (std::size_t i = 0; i < short_form.size(); ++i) {
    const std::string& s = short_form[i];
    const std::string& l = long_form[i];
    if (s == l) continue;
    if (!contracts(s, l)) return false;
    truncated = true;
  }
  return truncated;
}

std::string format_id(std::string_view prefix, std::size_t n) {
  std::string digits = std::to_string(n);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return std::string(prefix) + "-" + digits;
}

std::string_view to_string(Provenance p) {
  return p == Provenance::kPpdbPair ? "ppdb-pair" : "sampled-negative";
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return in;
}

}  // namespace

Phrase tokenize(std::string_view text) {
  Phrase out;
  std::istringstream in(lowercase(text));
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

std::string join(const Phrase& phrase) {
  std::string out;
  for (const auto& w : phrase) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::vector<SimilarityItem> parse_bird(std::istream& in) {
  std::vector<SimilarityItem> items;
  std::size_t src_col = 0, trg_col = 1, score_col = 2;
  bool first_row = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto cols = split(line, "\t");
    if (first_row) {
      first_row = false;
      const bool numeric =
          cols.size() > score_col && parse_double(cols[score_col]).has_value();
      if (!numeric) {
        std::optional<std::size_t> s, t, sc;
        for (std::size_t i = 0; i < cols.size(); ++i) {
          const std::string name = lowercase(trim(cols[i]));
          if (!s && (name == "term1" || name == "source")) s = i;
          else if (!t && (name == "term2" || name == "target")) t = i;
          else if (!sc && name.find("score") != std::string::npos) sc = i;
        }
        if (s && t && sc) {
          src_col = *s;
          trg_col = *t;
          score_col = *sc;
          continue;
        }
      }
    }
    const std::size_t needed = std::max({src_col, trg_col, score_col}) + 1;
    if (cols.size() < needed) {
      throw ParseError("expected at least " + std::to_string(needed) +
                           " tab-separated columns, got " +
                           std::to_string(cols.size()),
                       line_no);
    }
    const auto score = parse_double(cols[score_col]);
    if (!score) {
      throw ParseError("unparseable score '" + cols[score_col] + "'", line_no);
    }
    if (!(*score >= 0.0 && *score <= 1.0)) {
      throw ParseError("score " + trim(cols[score_col]) + " outside [0, 1]",
                       line_no);
    }
    SimilarityItem item{format_id("bird", items.size()), tokenize(cols[src_col]),
                        tokenize(cols[trg_col]), *score};
    if (item.source.empty() || item.target.empty()) {
      throw ParseError("empty phrase", line_no);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<SimilarityItem> load_bird(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_bird(in);
}

double word_overlap(const Phrase& source, const Phrase& target) {
  if (source.empty() || target.empty()) {
    throw Error("empty_phrase", "word_overlap needs non-empty phrases");
  }
  return static_cast<double>(multiset_intersection(source, target)) /
         static_cast<double>(std::max(source.size(), target.size()));
}

bool has_half_overlap(const Phrase& source, const Phrase& target) {
  if (source.empty() || target.empty()) return false;
  return 2 * multiset_intersection(source, target) ==
         std::max(source.size(), target.size());
}

bool is_abba(const Phrase& source, const Phrase& target) {
  return source.size() == 2 && target.size() == 2 && source[0] != source[1] &&
         source[0] == target[1] && source[1] == target[0];
}

std::vector<SimilarityItem> filter_abba(
    const std::vector<SimilarityItem>& items) {
  std::vector<SimilarityItem> out;
  std::copy_if(items.begin(), items.end(), std::back_inserter(out),
               [](const SimilarityItem& it) {
                 return is_abba(it.source, it.target);
               });
  return out;
}

std::vector<RawPair> parse_ppdb(std::istream& in) {
  std::vector<RawPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    if (line.find("|||") != std::string::npos) {
      fields = split(line, "|||");
      if (fields.size() < 3) {
        throw ParseError("PPDB row needs LHS ||| phrase ||| paraphrase",
                         line_no);
      }
      out.push_back({trim(fields[1]), trim(fields[2])});
    } else {
      fields = split(line, "\t");
      if (fields.size() < 2) {
        throw ParseError("expected source<TAB>target", line_no);
      }
      out.push_back({trim(fields[0]), trim(fields[1])});
    }
  }
  return out;
}

std::vector<RawPair> load_ppdb(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_ppdb(in);
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kHyperlink: return "hyperlink";
    case DropReason::kNonAlphabetic: return "non_alphabetic";
    case DropReason::kAbbreviation: return "abbreviation";
    case DropReason::kTense: return "tense";
  }
  return "?";
}

bool looks_like_url(std::string_view text) {
  static const std::regex kUrl(
      R"((https?|ftp)://|www\.|\.(com|org|net|edu|gov|html?)\b)",
      std::regex::icase);
  return std::regex_search(text.begin(), text.end(), kUrl);
}

Phrase strip_inflection(const Phrase& phrase) {
  Phrase out;
  out.reserve(phrase.size());
  for (const std::string& w : phrase) {
    std::string stem = w;
    for (std::string_view suffix : {"ing", "ed", "s"}) {
      if (stem.size() >= suffix.size() + 3 && stem.ends_with(suffix)) {
        stem.resize(stem.size() - suffix.size());
        break;
      }
    }
    out.push_back(std::move(stem));
  }
  return out;
}

bool is_abbreviation_pair(const Phrase& a, const Phrase& b) {
  return abbreviates(a, b) || abbreviates(b, a);
}

bool is_tense_pair(const Phrase& a, const Phrase& b) {
  return a != b && a.size() == b.size() &&
         strip_inflection(a) == strip_inflection(b);
}

std::optional<DropReason> drop_reason(const RawPair& pair) {
  if (looks_like_url(pair.source) || looks_like_url(pair.target)) {
    return DropReason::kHyperlink;
  }
  for (const std::string* s : {&pair.source, &pair.target}) {
    const bool clean = !trim(*s).empty() &&
                       std::all_of(s->begin(), s->end(), [](unsigned char c) {
                         return std::isalpha(c) || c == ' ';
                       });
    if (!clean) return DropReason::kNonAlphabetic;
  }
  const Phrase a = tokenize(pair.source);
  const Phrase b = tokenize(pair.target);
  if (is_tense_pair(a, b)) return DropReason::kTense;
  if (is_abbreviation_pair(a, b)) return DropReason::kAbbreviation;
  return std::nullopt;
}

CleanResult clean_ppdb(const std::vector<RawPair>& raw) {
  CleanResult result;
  for (DropReason r : {DropReason::kHyperlink, DropReason::kNonAlphabetic,
                       DropReason::kAbbreviation, DropReason::kTense}) {
    result.dropped[r] = 0;
  }
  for (const RawPair& pair : raw) {
    if (auto reason = drop_reason(pair)) {
      ++result.dropped[*reason];
      continue;
    }
    result.pairs.push_back({tokenize(pair.source), tokenize(pair.target)});
  }
  return result;
}

ClassificationSet build_classification_set(
    const std::vector<PhrasePair>& positives, const std::vector<Phrase>& pool,
    const ClassificationOptions& options) {
  // Sources in first-appearance order with their distinct paraphrases.
  std::vector<std::string> source_order;
  std::unordered_map<std::string, std::vector<Phrase>> paraphrases;
  std::unordered_map<std::string, std::unordered_set<std::string>> known;
  for (const PhrasePair& p : positives) {
    const std::string src = join(p.source);
    const std::string trg = join(p.target);
    if (p.source.empty() || p.target.empty() || src == trg) continue;
    auto [it, inserted] = known.try_emplace(src);
    if (inserted) source_order.push_back(src);
    if (!it->second.insert(trg).second) continue;
    if (options.half_overlap_positives && !has_half_overlap(p.source, p.target)) {
      continue;
    }
    paraphrases[src].push_back(p.target);
  }
  std::erase_if(source_order,
                [&](const std::string& s) { return paraphrases[s].empty(); });

  std::vector<Phrase> unique_pool;
  std::vector<std::string> pool_text;
  {
    std::unordered_set<std::string> seen;
    for (const Phrase& p : pool) {
      if (p.empty()) continue;
      std::string text = join(p);
      if (seen.insert(text).second) {
        unique_pool.push_back(p);
        pool_text.push_back(std::move(text));
      }
    }
  }
  std::unordered_map<std::string, std::vector<std::size_t>> by_word;
  if (options.negatives == NegativeConstraint::kHalfOverlap) {
    for (std::size_t i = 0; i < unique_pool.size(); ++i) {
      std::set<std::string> words(unique_pool[i].begin(), unique_pool[i].end());
      for (const auto& w : words) by_word[w].push_back(i);
    }
  }

  Rng rng(options.seed);
  if (options.target_size) {
    std::vector<std::string> shuffled = source_order;
    rng.shuffle(shuffled);
    std::unordered_set<std::string> chosen;
    std::size_t total = 0;
    for (const auto& s : shuffled) {
      const std::size_t add = 2 * paraphrases[s].size();
      if (total + add > *options.target_size) continue;
      total += add;
      chosen.insert(s);
    }
    std::erase_if(source_order,
                  [&](const std::string& s) { return !chosen.contains(s); });
  }

  ClassificationSet result;
  std::size_t next_id = 0;
  for (const std::string& src : source_order) {
    const std::vector<Phrase>& pos = paraphrases[src];
    const Phrase source = tokenize(src);
    const auto& excluded = known[src];
    auto eligible = [&](std::size_t i) {
      return pool_text[i] != src && !excluded.contains(pool_text[i]);
    };

    std::vector<std::size_t> picked;
    if (options.negatives == NegativeConstraint::kAny) {
      std::unordered_set<std::size_t> taken;
      const std::size_t max_tries = 32 * pos.size() + 32;
      for (std::size_t tries = 0;
           picked.size() < pos.size() && tries < max_tries &&
           !unique_pool.empty();
           ++tries) {
        const auto i = static_cast<std::size_t>(rng.below(unique_pool.size()));
        if (eligible(i) && taken.insert(i).second) picked.push_back(i);
      }
      if (picked.size() < pos.size()) {
        // Rejection sampling struggled; fall back to an explicit scan.
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < unique_pool.size(); ++i) {
          if (eligible(i) && !taken.contains(i)) rest.push_back(i);
        }
        rng.shuffle(rest);
        for (std::size_t i : rest) {
          if (picked.size() == pos.size()) break;
          picked.push_back(i);
        }
      }
    } else {
      std::set<std::size_t> candidates;
      for (const auto& w : source) {
        auto it = by_word.find(w);
        if (it == by_word.end()) continue;
        for (std::size_t i : it->second) {
          if (eligible(i) && has_half_overlap(source, unique_pool[i])) {
            candidates.insert(i);
          }
        }
      }
      std::vector<std::size_t> ordered(candidates.begin(), candidates.end());
      rng.shuffle(ordered);
      ordered.resize(std::min(ordered.size(), pos.size()));
      picked = std::move(ordered);
    }

    if (picked.size() < pos.size()) {
      if (options.on_exhausted == ExhaustionPolicy::kError) {
        throw Error("pool_exhausted",
                    "only " + std::to_string(picked.size()) +
                        " negative candidates for source '" + src + "', need " +
                        std::to_string(pos.size()));
      }
      ++result.skipped_sources;
      continue;
    }
    for (const Phrase& trg : pos) {
      result.items.push_back({format_id(options.id_prefix, next_id++), source,
                              trg, Label::kPositive, Provenance::kPpdbPair});
    }
    for (std::size_t i : picked) {
      result.items.push_back({format_id(options.id_prefix, next_id++), source,
                              unique_pool[i], Label::kNegative,
                              Provenance::kSampledNegative});
    }
  }
  return result;
}

std::vector<ParaphraseItem> filter_overlap_50(
    const std::vector<ParaphraseItem>& items) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (has_half_overlap(items[i].source, items[i].target)) kept.push_back(i);
  }
  // Per source, keep min(pos, neg) of each label, lowest item_id first.
  std::map<std::string, std::array<std::vector<std::size_t>, 2>> groups;
  for (std::size_t i : kept) {
    groups[join(items[i].source)][static_cast<int>(items[i].label)].push_back(i);
  }
  std::vector<bool> retain(items.size(), false);
  for (auto& [src, by_label] : groups) {
    const std::size_t n = std::min(by_label[0].size(), by_label[1].size());
    for (auto& idx : by_label) {
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return items[a].item_id < items[b].item_id;
      });
      for (std::size_t k = 0; k < n; ++k) retain[idx[k]] = true;
    }
  }
  std::vector<ParaphraseItem> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (retain[i]) out.push_back(items[i]);
  }
  return out;
}

std::size_t test_size_for(std::size_t n, double fraction) {
  return static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 0.5));
}

std::pair<std::vector<ParaphraseItem>, std::vector<ParaphraseItem>>
split_train_test(const std::vector<ParaphraseItem>& items,
                 const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error("bad_split", "test_fraction must lie in (0, 1)");
  }
  if (items.size() < 4) {
    throw Error("too_few_items", "need at least 4 items to split, got " +
                                     std::to_string(items.size()));
  }
  const std::size_t n_test = test_size_for(items.size(), spec.test_fraction);
  Rng rng(spec.seed);
  std::vector<bool> in_test(items.size(), false);

  if (spec.group_by_source) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < items.size(); ++i) {
      groups[join(items[i].source)].push_back(i);
    }
    std::vector<const std::vector<std::size_t>*> order;
    for (const auto& [k, v] : groups) order.push_back(&v);
    rng.shuffle(order);
    std::size_t taken = 0;
    for (const auto* g : order) {
      if (taken >= n_test) break;
      for (std::size_t i : *g) in_test[i] = true;
      taken += g->size();
    }
  } else if (spec.stratified) {
    std::array<std::vector<std::size_t>, 2> by_label;
    for (std::size_t i = 0; i < items.size(); ++i) {
      by_label[static_cast<int>(items[i].label)].push_back(i);
    }
    // Negative quota rounded from the overall ratio, clamped so both labels
    // can fill their share.
    const double neg_share = static_cast<double>(n_test) *
                             static_cast<double>(by_label[0].size()) /
                             static_cast<double>(items.size());
    std::size_t neg_quota = static_cast<std::size_t>(std::floor(neg_share + 0.5));
    neg_quota = std::min({neg_quota, by_label[0].size(), n_test});
    if (n_test - neg_quota > by_label[1].size()) {
      neg_quota = n_test - by_label[1].size();
    }
    const std::size_t pos_quota = n_test - neg_quota;
    const std::array<std::size_t, 2> quota = {neg_quota, pos_quota};
    for (int label = 0; label < 2; ++label) {
      rng.shuffle(by_label[label]);
      for (std::size_t k = 0; k < quota[label]; ++k) {
        in_test[by_label[label][k]] = true;
      }
    }
  } else {
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t k = 0; k < n_test; ++k) in_test[order[k]] = true;
  }

  std::pair<std::vector<ParaphraseItem>, std::vector<ParaphraseItem>> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    (in_test[i] ? out.second : out.first).push_back(items[i]);
  }
  return out;
}

void write_similarity_jsonl(const std::vector<SimilarityItem>& items,
                            std::string_view subset, std::ostream& out) {
  for (const SimilarityItem& it : items) {
    json j;
    j["item_id"] = it.item_id;
    j["source"] = join(it.source);
    j["target"] = join(it.target);
    j["score"] = it.score;
    j["subset"] = subset;
    out << j.dump() << '\n';
  }
}

std::vector<SimilarityItem> read_similarity_jsonl(std::istream& in) {
  std::vector<SimilarityItem> out;
  const auto lines = read_lines(in);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    try {
      const json j = json::parse(lines[n]);
      SimilarityItem it{j.at("item_id").get<std::string>(),
                        tokenize(j.at("source").get<std::string>()),
                        tokenize(j.at("target").get<std::string>()),
                        j.at("score").get<double>()};
      if (it.source.empty() || it.target.empty()) {
        throw ParseError("empty phrase", n + 1);
      }
      if (!(it.score >= 0.0 && it.score <= 1.0)) {
        throw ParseError("score outside [0, 1]", n + 1);
      }
      out.push_back(std::move(it));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad similarity item: ") + e.what(), n + 1);
    }
  }
  return out;
}

void write_paraphrase_jsonl(const std::vector<ParaphraseItem>& items,
                            std::string_view subset, std::ostream& out) {
  for (const ParaphraseItem& it : items) {
    json j;
    j["item_id"] = it.item_id;
    j["source"] = join(it.source);
    j["target"] = join(it.target);
    j["label"] = static_cast<int>(it.label);
    j["provenance"] = to_string(it.provenance);
    j["subset"] = subset;
    out << j.dump() << '\n';
  }
}

std::vector<ParaphraseItem> read_paraphrase_jsonl(std::istream& in) {
  std::vector<ParaphraseItem> out;
  const auto lines = read_lines(in);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    try {
      const json j = json::parse(lines[n]);
      ParaphraseItem it;
      it.item_id = j.at("item_id").get<std::string>();
      it.source = tokenize(j.at("source").get<std::string>());
      it.target = tokenize(j.at("target").get<std::string>());
      const int label = j.at("label").get<int>();
      if (label != 0 && label != 1) throw ParseError("label must be 0 or 1", n + 1);
      it.label = static_cast<Label>(label);
      it.provenance = j.value("provenance", std::string("ppdb-pair")) ==
                              "sampled-negative"
                          ? Provenance::kSampledNegative
                          : Provenance::kPpdbPair;
      if (it.provenance == Provenance::kSampledNegative &&
          it.label != Label::kNegative) {
        throw ParseError("sampled negative labelled positive", n + 1);
      }
      if (it.source.empty() || it.target.empty()) {
        throw ParseError("empty phrase", n + 1);
      }
      out.push_back(std::move(it));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad paraphrase item: ") + e.what(), n + 1);
    }
  }
  return out;
}

std::vector<Phrase> read_phrase_pool(std::istream& in) {
  std::vector<Phrase> out;
  for (const auto& line : read_lines(in)) {
    Phrase p = tokenize(line);
    if (!p.empty()) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace phrprobe
