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

#ifndef PHRPROBE_EMBEDDING_STORE_H_
#define PHRPROBE_EMBEDDING_STORE_H_

// Binary dump of layerwise token embeddings.
//
// Layout (all integers and floats little-endian):
//
//   header (28 bytes)
//     magic            8 bytes  "PHRPROBE"
//     format_version   u32
//     hidden_dim       u32      D
//     num_layers       u32      L, including layer 0 (input embeddings)
//     num_records      u64
//   record (28-byte prefix + payload), repeated num_records times
//     record_id        u64
//     num_tokens       u32      T
//     span_start       u32      a  (inclusive)
//     span_end         u32      b  (inclusive)
//     cls_pos          i32      -1 if the model has no CLS token
//     sep_pos          i32      -1 if the model has no SEP token
//     data             f32[L][T][D]
//
// A JSON-lines manifest is stored next to the binary file as
// "<dump>.manifest.jsonl", one object per record.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phrprobe {

inline constexpr std::string_view kDumpMagic = "PHRPROBE";
inline constexpr std::uint32_t kDumpFormatVersion = 1;
inline constexpr std::size_t kDumpHeaderBytes = 28;
inline constexpr std::size_t kRecordPrefixBytes = 28;

struct DumpHeader {
  std::uint32_t format_version = kDumpFormatVersion;
  std::uint32_t hidden_dim = 0;
  std::uint32_t num_layers = 0;
  std::uint64_t num_records = 0;

  bool operator==(const DumpHeader&) const = default;
};

// Inclusive token range [start, end].
struct TokenSpan {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t length() const { return end - start + 1; }
  bool operator==(const TokenSpan&) const = default;
};

struct SequenceRecord {
  std::uint64_t record_id = 0;
  std::uint32_t num_tokens = 0;
  TokenSpan span;
  std::int32_t cls_pos = -1;
  std::int32_t sep_pos = -1;
  // Shape of `data`; taken from the dump header, not serialized per record.
  std::uint32_t num_layers = 0;
  std::uint32_t hidden_dim = 0;
  std::vector<float> data;  // [layer][token][dim]

  // Contiguous T x D block of one layer.
  std::span<const float> layer(std::uint32_t layer) const;
  std::span<float> layer(std::uint32_t layer);
  std::span<const float> token(std::uint32_t layer, std::uint32_t token) const;

  bool operator==(const SequenceRecord&) const = default;
};

enum class RecordRole { kSource, kTarget, kLandmarkPhrase, kLandmarkWord };
enum class ContextMode { kPhraseOnly, kContextAvailable };

std::string_view to_string(RecordRole role);
std::string_view to_string(ContextMode mode);
RecordRole parse_record_role(std::string_view text);
ContextMode parse_context_mode(std::string_view text);

struct ManifestEntry {
  std::uint64_t record_id = 0;
  std::string item_id;
  RecordRole role = RecordRole::kSource;
  std::string phrase_text;
  ContextMode context_mode = ContextMode::kPhraseOnly;
  // Sub-tokens of the phrase's final word, used by Head-Word pooling.
  std::optional<TokenSpan> head_span;

  bool operator==(const ManifestEntry&) const = default;
};

struct Dump {
  DumpHeader header;
  std::vector<SequenceRecord> records;
  std::vector<ManifestEntry> manifest;

  bool operator==(const Dump&) const = default;
};

struct Diagnostic {
  std::string code;
  std::string message;
  std::optional<std::uint64_t> record_id;
  std::optional<std::uint32_t> layer;
  std::optional<std::uint32_t> token;
  std::optional<std::uint32_t> dim;
  std::optional<std::uint64_t> offset;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& dump);

// Stream-level codec. `write_dump_binary` validates first and throws
// DumpError on any diagnostic; `read_dump_binary` fills header and records
// and throws DumpError with the failing byte offset.
void write_dump_binary(const Dump& dump, std::ostream& out);
void read_dump_binary(std::istream& in, Dump& dump);

void write_manifest(const std::vector<ManifestEntry>& manifest,
                    std::ostream& out);
std::vector<ManifestEntry> read_manifest(std::istream& in);

// File-level API. A missing manifest sidecar yields an empty manifest.
void write_dump(const Dump& dump, const std::filesystem::path& destination);
Dump read_dump(const std::filesystem::path& path);

// Empty iff every header/record/manifest invariant holds. Never throws.
std::vector<Diagnostic> validate_dump(const Dump& dump);

// read_dump + validate_dump, with read failures reported as diagnostics.
std::vector<Diagnostic> validate_dump_file(const std::filesystem::path& path);

}  // namespace phrprobe

#endif  // PHRPROBE_EMBEDDING_STORE_H_
