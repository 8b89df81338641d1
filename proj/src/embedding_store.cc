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

#include "phrprobe/embedding_store.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phrprobe/error.h"
#include "little_endian.h"

namespace phrprobe {
namespace {

using json = nlohmann::json;

template <typename T>
void put(std::ostream& out, T value) {
  value = internal::little_endian(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void put_floats(std::ostream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float v : values) put(out, v);
  }
}

// Tracks the byte offset so errors can point at the failing location.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t offset() const { return offset_; }

  template <typename T>
  T get(const char* what, std::optional<std::uint64_t> record_id) {
    T value;
    read_bytes(reinterpret_cast<char*>(&value), sizeof(T), what, record_id);
    return internal::little_endian(value);
  }

  void get_floats(std::span<float> values, std::optional<std::uint64_t> id) {
    read_bytes(reinterpret_cast<char*>(values.data()), values.size_bytes(),
               "tensor payload", id);
    if constexpr (std::endian::native == std::endian::big) {
      for (float& v : values) v = internal::little_endian(v);
    }
  }

  void read_bytes(char* dst, std::size_t n, const char* what,
                  std::optional<std::uint64_t> record_id) {
    in_.read(dst, static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) {
      std::string msg = std::string("truncated dump while reading ") + what;
      if (record_id) msg += " of record_id " + std::to_string(*record_id);
      msg += " at byte offset " + std::to_string(offset_ + got);
      throw DumpError("truncated", msg, offset_ + got, record_id);
    }
    offset_ += n;
  }

  bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

std::string where(std::uint64_t record_id) {
  return "record_id " + std::to_string(record_id);
}

void check_position(std::int32_t pos, std::uint32_t num_tokens,
                    const char* name, const SequenceRecord& r,
                    std::vector<Diagnostic>& out) {
  if (pos == -1) return;
  if (pos < 0 || static_cast<std::uint32_t>(pos) >= num_tokens) {
    out.push_back({"position_out_of_range",
                   where(r.record_id) + ": " + name + " " +
                       std::to_string(pos) + " outside [0, " +
                       std::to_string(num_tokens) + ")",
                   r.record_id});
  }
}

}  // namespace

std::span<const float> SequenceRecord::layer(std::uint32_t l) const {
  const std::size_t block = std::size_t{num_tokens} * hidden_dim;
  return std::span<const float>(data).subspan(l * block, block);
}

std::span<float> SequenceRecord::layer(std::uint32_t l) {
  const std::size_t block = std::size_t{num_tokens} * hidden_dim;
  return std::span<float>(data).subspan(l * block, block);
}

std::span<const float> SequenceRecord::token(std::uint32_t l,
                                             std::uint32_t t) const {
  return layer(l).subspan(std::size_t{t} * hidden_dim, hidden_dim);
}

std::string_view to_string(RecordRole role) {
  switch (role) {
    case RecordRole::kSource: return "source";
    case RecordRole::kTarget: return "target";
    case RecordRole::kLandmarkPhrase: return "landmark-phrase";
    case RecordRole::kLandmarkWord: return "landmark-word";
  }
  return "?";
}

std::string_view to_string(ContextMode mode) {
  return mode == ContextMode::kPhraseOnly ? "phrase-only"
                                          : "context-available";
}

RecordRole parse_record_role(std::string_view text) {
  if (text == "source") return RecordRole::kSource;
  if (text == "target") return RecordRole::kTarget;
  if (text == "landmark-phrase") return RecordRole::kLandmarkPhrase;
  if (text == "landmark-word") return RecordRole::kLandmarkWord;
  throw Error("manifest", "unknown record role '" + std::string(text) + "'");
}

ContextMode parse_context_mode(std::string_view text) {
  if (text == "phrase-only") return ContextMode::kPhraseOnly;
  if (text == "context-available") return ContextMode::kContextAvailable;
  throw Error("manifest", "unknown context mode '" + std::string(text) + "'");
}

std::filesystem::path manifest_path_for(const std::filesystem::path& dump) {
  auto p = dump;
  p += ".manifest.jsonl";
  return p;
}

std::vector<Diagnostic> validate_dump(const Dump& dump) {
  std::vector<Diagnostic> out;
  const DumpHeader& h = dump.header;
  if (h.format_version != kDumpFormatVersion) {
    out.push_back({"unsupported_version",
                   "format_version " + std::to_string(h.format_version)});
  }
  if (h.hidden_dim < 1) out.push_back({"bad_header", "hidden_dim must be >= 1"});
  if (h.num_layers < 1) out.push_back({"bad_header", "num_layers must be >= 1"});
  if (h.num_records != dump.records.size()) {
    out.push_back({"record_count_mismatch",
                   "header declares " + std::to_string(h.num_records) +
                       " records, dump holds " +
                       std::to_string(dump.records.size())});
  }

  std::map<std::uint64_t, int> seen;
  for (const SequenceRecord& r : dump.records) {
    if (++seen[r.record_id] == 2) {
      out.push_back({"duplicate_record_id", where(r.record_id) + " repeated",
                     r.record_id});
    }
    if (r.num_tokens == 0) {
      out.push_back({"empty_record", where(r.record_id) + " has no tokens",
                     r.record_id});
    }
    if (r.span.start > r.span.end || r.span.end >= r.num_tokens) {
      out.push_back({"span_out_of_range",
                     where(r.record_id) + ": span [" +
                         std::to_string(r.span.start) + ", " +
                         std::to_string(r.span.end) + "] invalid for " +
                         std::to_string(r.num_tokens) + " tokens",
                     r.record_id});
    }
    check_position(r.cls_pos, r.num_tokens, "cls_pos", r, out);
    check_position(r.sep_pos, r.num_tokens, "sep_pos", r, out);

    const std::size_t expected =
        std::size_t{h.num_layers} * r.num_tokens * h.hidden_dim;
    if (r.num_layers != h.num_layers || r.hidden_dim != h.hidden_dim ||
        r.data.size() != expected) {
      out.push_back({"shape_mismatch",
                     where(r.record_id) + ": payload has " +
                         std::to_string(r.data.size()) + " floats, expected " +
                         std::to_string(expected),
                     r.record_id});
      continue;
    }
    for (std::size_t i = 0; i < r.data.size(); ++i) {
      if (std::isfinite(r.data[i])) continue;
      const std::size_t d = i % h.hidden_dim;
      const std::size_t t = (i / h.hidden_dim) % r.num_tokens;
      const std::size_t l = i / (std::size_t{h.hidden_dim} * r.num_tokens);
      Diagnostic diag{"non_finite",
                      where(r.record_id) + ": non-finite value at layer " +
                          std::to_string(l) + ", token " + std::to_string(t) +
                          ", dim " + std::to_string(d),
                      r.record_id};
      diag.layer = static_cast<std::uint32_t>(l);
      diag.token = static_cast<std::uint32_t>(t);
      diag.dim = static_cast<std::uint32_t>(d);
      out.push_back(std::move(diag));
    }
  }

  if (!dump.manifest.empty()) {
    std::map<std::uint64_t, int> listed;
    for (const ManifestEntry& e : dump.manifest) {
      if (++listed[e.record_id] == 2) {
        out.push_back({"manifest_duplicate",
                       where(e.record_id) + " listed twice in manifest",
                       e.record_id});
      }
      if (!seen.contains(e.record_id)) {
        out.push_back({"manifest_unknown_record",
                       where(e.record_id) + " in manifest but not in dump",
                       e.record_id});
      }
    }
    for (const SequenceRecord& r : dump.records) {
      if (!listed.contains(r.record_id)) {
        out.push_back({"manifest_missing",
                       where(r.record_id) + " missing from manifest",
                       r.record_id});
      }
    }
    std::map<std::uint64_t, const SequenceRecord*> by_id;
    for (const SequenceRecord& r : dump.records) by_id[r.record_id] = &r;
    for (const ManifestEntry& e : dump.manifest) {
      if (!e.head_span) continue;
      auto it = by_id.find(e.record_id);
      if (it == by_id.end()) continue;
      const TokenSpan& s = it->second->span;
      if (e.head_span->start > e.head_span->end ||
          e.head_span->start < s.start || e.head_span->end > s.end) {
        out.push_back({"head_span_out_of_range",
                       where(e.record_id) + ": head span outside phrase span",
                       e.record_id});
      }
    }
  }
  return out;
}

void write_dump_binary(const Dump& dump, std::ostream& out) {
  auto diagnostics = validate_dump(dump);
  if (!diagnostics.empty()) {
    const auto& first = diagnostics.front();
    throw DumpError(first.code,
                    "refusing to write invalid dump: " + first.message, 0,
                    first.record_id);
  }
  const DumpHeader& h = dump.header;
  out.write(kDumpMagic.data(), static_cast<std::streamsize>(kDumpMagic.size()));
  put(out, h.format_version);
  put(out, h.hidden_dim);
  put(out, h.num_layers);
  put(out, h.num_records);
  for (const SequenceRecord& r : dump.records) {
    put(out, r.record_id);
    put(out, r.num_tokens);
    put(out, r.span.start);
    put(out, r.span.end);
    put(out, r.cls_pos);
    put(out, r.sep_pos);
    put_floats(out, r.data);
  }
  if (!out) throw DumpError("io", "write failed", 0);
}

void read_dump_binary(std::istream& in, Dump& dump) {
  Reader reader(in);
  char magic[8];
  reader.read_bytes(magic, sizeof(magic), "magic", std::nullopt);
  if (std::string_view(magic, 8) != kDumpMagic) {
    throw DumpError("bad_magic",
                    "bad magic '" + std::string(magic, 8) + "' at byte offset 0",
                    0);
  }
  DumpHeader& h = dump.header;
  h.format_version = reader.get<std::uint32_t>("format_version", std::nullopt);
  if (h.format_version != kDumpFormatVersion) {
    throw DumpError("unsupported_version",
                    "unsupported format_version " +
                        std::to_string(h.format_version) + " at byte offset 8",
                    8);
  }
  h.hidden_dim = reader.get<std::uint32_t>("hidden_dim", std::nullopt);
  h.num_layers = reader.get<std::uint32_t>("num_layers", std::nullopt);
  h.num_records = reader.get<std::uint64_t>("num_records", std::nullopt);
  if (h.hidden_dim == 0 || h.num_layers == 0) {
    throw DumpError("bad_header", "hidden_dim and num_layers must be >= 1",
                    12);
  }

  dump.records.clear();
  for (std::uint64_t i = 0; i < h.num_records; ++i) {
    const std::uint64_t record_offset = reader.offset();
    SequenceRecord r;
    r.num_layers = h.num_layers;
    r.hidden_dim = h.hidden_dim;
    try {
      r.record_id = reader.get<std::uint64_t>("record_id", std::nullopt);
    } catch (const DumpError& e) {
      throw DumpError("truncated",
                      "truncated dump in header of record #" +
                          std::to_string(i) + " at byte offset " +
                          std::to_string(e.offset()),
                      e.offset());
    }
    r.num_tokens = reader.get<std::uint32_t>("num_tokens", r.record_id);
    r.span.start = reader.get<std::uint32_t>("span_start", r.record_id);
    r.span.end = reader.get<std::uint32_t>("span_end", r.record_id);
    r.cls_pos = reader.get<std::int32_t>("cls_pos", r.record_id);
    r.sep_pos = reader.get<std::int32_t>("sep_pos", r.record_id);
    if (r.num_tokens == 0 || r.span.start > r.span.end ||
        r.span.end >= r.num_tokens) {
      throw DumpError("span_out_of_range",
                      where(r.record_id) + ": span [" +
                          std::to_string(r.span.start) + ", " +
                          std::to_string(r.span.end) + "] invalid for " +
                          std::to_string(r.num_tokens) +
                          " tokens at byte offset " +
                          std::to_string(record_offset),
                      record_offset, r.record_id);
    }
    for (std::int32_t pos : {r.cls_pos, r.sep_pos}) {
      if (pos != -1 &&
          (pos < 0 || static_cast<std::uint32_t>(pos) >= r.num_tokens)) {
        throw DumpError("span_out_of_range",
                        where(r.record_id) + ": special-token position " +
                            std::to_string(pos) + " out of range at byte " +
                            "offset " + std::to_string(record_offset),
                        record_offset, r.record_id);
      }
    }
    r.data.resize(std::size_t{h.num_layers} * r.num_tokens * h.hidden_dim);
    reader.get_floats(r.data, r.record_id);
    dump.records.push_back(std::move(r));
  }
  if (!reader.at_eof()) {
    throw DumpError("trailing_bytes",
                    "unexpected bytes after last record at byte offset " +
                        std::to_string(reader.offset()),
                    reader.offset());
  }
}

void write_manifest(const std::vector<ManifestEntry>& manifest,
                    std::ostream& out) {
  for (const ManifestEntry& e : manifest) {
    json j;
    j["record_id"] = e.record_id;
    j["item_id"] = e.item_id;
    j["role"] = to_string(e.role);
    j["phrase_text"] = e.phrase_text;
    j["context_mode"] = to_string(e.context_mode);
    if (e.head_span) {
      j["head_start"] = e.head_span->start;
      j["head_end"] = e.head_span->end;
    }
    out << j.dump() << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(std::istream& in) {
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      ManifestEntry e;
      e.record_id = j.at("record_id").get<std::uint64_t>();
      e.item_id = j.at("item_id").get<std::string>();
      e.role = parse_record_role(j.at("role").get<std::string>());
      e.phrase_text = j.at("phrase_text").get<std::string>();
      e.context_mode =
          parse_context_mode(j.value("context_mode", std::string("phrase-only")));
      if (j.contains("head_start") && j.contains("head_end")) {
        e.head_span = TokenSpan{j["head_start"].get<std::uint32_t>(),
                                j["head_end"].get<std::uint32_t>()};
      }
      out.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad manifest entry: ") + e.what(), line_no);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

void write_dump(const Dump& dump, const std::filesystem::path& destination) {
  {
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DumpError("io", "cannot open " + destination.string() +
                                " for writing", 0);
    }
    write_dump_binary(dump, out);
  }
  std::ofstream mout(manifest_path_for(destination), std::ios::trunc);
  if (!mout) {
    throw DumpError("io", "cannot write manifest for " + destination.string(),
                    0);
  }
  write_manifest(dump.manifest, mout);
}

Dump read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DumpError("io", "cannot open " + path.string(), 0);
  Dump dump;
  read_dump_binary(in, dump);
  std::ifstream min(manifest_path_for(path));
  if (min) dump.manifest = read_manifest(min);
  return dump;
}

std::vector<Diagnostic> validate_dump_file(const std::filesystem::path& path) {
  try {
    return validate_dump(read_dump(path));
  } catch (const DumpError& e) {
    Diagnostic d{e.kind(), e.what(), e.record_id()};
    d.offset = e.offset();
    return {d};
  } catch (const Error& e) {
    return {{e.kind(), e.what()}};
  }
}

}  // namespace phrprobe
