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

#include "phrprobe/report.h"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "phrprobe/error.h"

namespace phrprobe {
namespace {

using json = nlohmann::json;

std::string metric_or_blank(const std::optional<double>& v) {
  return v ? format_metric(*v) : std::string();
}

json metric_or_null(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename Extra, typename Fill>
json grid_json(const LayerGrid<Extra>& grid, const char* metric, Fill fill) {
  json cells = json::array();
  for (std::uint32_t l = 0; l < grid.num_layers; ++l) {
    for (std::size_t r = 0; r < grid.reprs.size(); ++r) {
      const auto& cell = grid.at(l, r);
      json j;
      j["layer"] = l;
      j["repr"] = to_string(grid.reprs[r]);
      j[metric] = metric_or_null(cell.value);
      fill(j, cell.extra);
      if (!cell.reason.empty()) j["reason"] = cell.reason;
      cells.push_back(std::move(j));
    }
  }
  json reprs = json::array();
  for (ReprType r : grid.reprs) reprs.push_back(to_string(r));
  return {{"metric", metric},
          {"num_layers", grid.num_layers},
          {"reprs", reprs},
          {"cells", cells},
          {"warnings", grid.warnings}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

std::string format_metric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10f", value);
  return buf;
}

void write_csv(const CorrelationGrid& grid, std::ostream& out) {
  out << "layer,repr,n,r\n";
  for (std::uint32_t l = 0; l < grid.num_layers; ++l) {
    for (std::size_t r = 0; r < grid.reprs.size(); ++r) {
      const auto& c = grid.at(l, r);
      out << l << ',' << to_string(grid.reprs[r]) << ',' << c.extra.n << ','
          << metric_or_blank(c.value) << '\n';
    }
  }
}

void write_csv(const AccuracyGrid& grid, std::ostream& out) {
  out << "layer,repr,n_train,n_test,accuracy\n";
  for (std::uint32_t l = 0; l < grid.num_layers; ++l) {
    for (std::size_t r = 0; r < grid.reprs.size(); ++r) {
      const auto& c = grid.at(l, r);
      out << l << ',' << to_string(grid.reprs[r]) << ',' << c.extra.n_train
          << ',' << c.extra.n_test << ',' << metric_or_blank(c.value) << '\n';
    }
  }
}

void write_csv(const LandmarkGrid& grid, std::ostream& out) {
  out << "layer,repr,fraction,n_decided,n_undecided\n";
  for (std::uint32_t l = 0; l < grid.num_layers; ++l) {
    for (std::size_t r = 0; r < grid.reprs.size(); ++r) {
      const auto& c = grid.at(l, r);
      out << l << ',' << to_string(grid.reprs[r]) << ','
          << metric_or_blank(c.value) << ',' << c.extra.n_decided << ','
          << c.extra.n_undecided << '\n';
    }
  }
}

json to_json(const CorrelationGrid& grid) {
  return grid_json(grid, "r", [](json& j, const CorrelationExtra& e) {
    j["n"] = e.n;
  });
}

json to_json(const AccuracyGrid& grid) {
  return grid_json(grid, "accuracy", [](json& j, const AccuracyExtra& e) {
    j["n_train"] = e.n_train;
    j["n_test"] = e.n_test;
    j["final_train_loss"] = e.final_train_loss;
  });
}

json to_json(const LandmarkGrid& grid) {
  return grid_json(grid, "fraction", [](json& j, const LandmarkExtra& e) {
    j["n_decided"] = e.n_decided;
    j["n_undecided"] = e.n_undecided;
  });
}

MetricTable parse_metric_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty grid file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  std::optional<std::size_t> layer_col, repr_col, metric_col;
  MetricTable table;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "layer") layer_col = i;
    else if (header[i] == "repr") repr_col = i;
    else if (header[i] == "r" || header[i] == "accuracy" ||
             header[i] == "fraction") {
      metric_col = i;
      table.metric = header[i];
    }
  }
  if (!layer_col || !repr_col || !metric_col) {
    throw ParseError("grid header needs layer, repr and a metric column", 1);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields",
                       line_no);
    }
    MetricRow row;
    try {
      row.layer = static_cast<std::uint32_t>(std::stoul(fields[*layer_col]));
      row.repr = fields[*repr_col];
      if (!fields[*metric_col].empty()) {
        row.value = std::stod(fields[*metric_col]);
      }
    } catch (const std::exception&) {
      throw ParseError("unparseable grid row", line_no);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

MetricTable load_metric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return parse_metric_csv(in);
}

DeltaTable compare_grids(const MetricTable& full,
                         const MetricTable& controlled) {
  if (full.metric != controlled.metric) {
    throw Error("shape_mismatch", "cannot compare metric '" + full.metric +
                                      "' with '" + controlled.metric + "'");
  }
  std::map<std::pair<std::uint32_t, std::string>, std::optional<double>> other;
  for (const auto& row : controlled.rows) {
    other[{row.layer, row.repr}] = row.value;
  }
  if (other.size() != full.rows.size()) {
    throw Error("shape_mismatch", "grids have different cell counts");
  }
  DeltaTable table;
  table.metric = full.metric;
  std::map<std::string, std::size_t> drop_index;
  for (const auto& row : full.rows) {
    auto it = other.find({row.layer, row.repr});
    if (it == other.end()) {
      throw Error("shape_mismatch", "cell (" + std::to_string(row.layer) +
                                        ", " + row.repr +
                                        ") missing from controlled grid");
    }
    DeltaRow d{row.layer, row.repr, row.value, it->second, std::nullopt};
    if (d.full && d.controlled) d.delta = *d.full - *d.controlled;
    table.rows.push_back(d);

    auto [slot, inserted] = drop_index.try_emplace(row.repr, table.max_drops.size());
    if (inserted) table.max_drops.push_back({row.repr, std::nullopt, std::nullopt});
    MaxDrop& m = table.max_drops[slot->second];
    if (d.delta && (!m.drop || *d.delta > *m.drop)) {
      m.drop = d.delta;
      m.layer = d.layer;
    }
  }
  return table;
}

void write_csv(const DeltaTable& table, std::ostream& out) {
  out << "layer,repr,full,controlled,delta\n";
  for (const auto& r : table.rows) {
    out << r.layer << ',' << r.repr << ',' << metric_or_blank(r.full) << ','
        << metric_or_blank(r.controlled) << ',' << metric_or_blank(r.delta)
        << '\n';
  }
}

json to_json(const DeltaTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"layer", r.layer},
                    {"repr", r.repr},
                    {"full", metric_or_null(r.full)},
                    {"controlled", metric_or_null(r.controlled)},
                    {"delta", metric_or_null(r.delta)}});
  }
  json drops = json::array();
  for (const auto& m : table.max_drops) {
    drops.push_back({{"repr", m.repr},
                     {"max_drop", metric_or_null(m.drop)},
                     {"layer", m.layer ? json(*m.layer) : json(nullptr)}});
  }
  return {{"metric", table.metric}, {"cells", rows}, {"max_drop", drops}};
}

}  // namespace phrprobe
