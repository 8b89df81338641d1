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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "phrprobe/classifier.h"
#include "phrprobe/commands.h"
#include "phrprobe/correlation.h"
#include "phrprobe/dataset.h"
#include "phrprobe/embedding_store.h"
#include "phrprobe/error.h"
#include "phrprobe/pooling.h"

namespace py = pybind11;
using namespace phrprobe;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray =
    py::array_t<double, py::array::c_style | py::array::forcecast>;

SequenceRecord make_record(std::uint64_t record_id, const FloatArray& data,
                           std::uint32_t span_start, std::uint32_t span_end,
                           std::int32_t cls_pos, std::int32_t sep_pos) {
  if (data.ndim() != 3) {
    throw py::value_error("data must have shape (layers, tokens, dim)");
  }
  SequenceRecord r;
  r.record_id = record_id;
  r.num_layers = static_cast<std::uint32_t>(data.shape(0));
  r.num_tokens = static_cast<std::uint32_t>(data.shape(1));
  r.hidden_dim = static_cast<std::uint32_t>(data.shape(2));
  r.span = {span_start, span_end};
  r.cls_pos = cls_pos;
  r.sep_pos = sep_pos;
  r.data.assign(data.data(), data.data() + data.size());
  return r;
}

FloatArray to_numpy(std::span<const float> values,
                    std::vector<py::ssize_t> shape) {
  FloatArray out(shape);
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::list diagnostics_to_py(const std::vector<Diagnostic>& diagnostics) {
  py::list out;
  for (const auto& d : diagnostics) {
    py::dict item;
    item["code"] = d.code;
    item["message"] = d.message;
    item["record_id"] = d.record_id;
    item["layer"] = d.layer;
    item["token"] = d.token;
    item["dim"] = d.dim;
    item["offset"] = d.offset;
    out.append(item);
  }
  return out;
}

FeatureSet to_features(const DoubleArray& x, const std::vector<int>& labels) {
  if (x.ndim() != 2 || static_cast<std::size_t>(x.shape(0)) != labels.size()) {
    throw py::value_error("features must be (n, dim) with n labels");
  }
  FeatureSet set;
  // Row-major (n, dim) buffer viewed as column-major (dim, n).
  set.inputs = Eigen::Map<const Eigen::MatrixXd>(x.data(), x.shape(1), x.shape(0));
  for (int l : labels) {
    set.labels.push_back(l ? Label::kPositive : Label::kNegative);
  }
  return set;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "phrprobe analysis core";

  static py::exception<Error> error(m, "PhrprobeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::class_<SequenceRecord>(m, "SequenceRecord")
      .def(py::init(&make_record), py::arg("record_id"), py::arg("data"),
           py::arg("span_start"), py::arg("span_end"), py::arg("cls_pos") = -1,
           py::arg("sep_pos") = -1)
      .def_readonly("record_id", &SequenceRecord::record_id)
      .def_readonly("num_tokens", &SequenceRecord::num_tokens)
      .def_readonly("num_layers", &SequenceRecord::num_layers)
      .def_readonly("hidden_dim", &SequenceRecord::hidden_dim)
      .def_readonly("cls_pos", &SequenceRecord::cls_pos)
      .def_readonly("sep_pos", &SequenceRecord::sep_pos)
      .def_property_readonly("span",
                             [](const SequenceRecord& r) {
                               return py::make_tuple(r.span.start, r.span.end);
                             })
      .def_property_readonly("data",
                             [](const SequenceRecord& r) {
                               return to_numpy(r.data, {r.num_layers, r.num_tokens,
                                                        r.hidden_dim});
                             })
      .def("layer", [](const SequenceRecord& r, std::uint32_t layer) {
        if (layer >= r.num_layers) throw py::index_error("layer out of range");
        return to_numpy(r.layer(layer), {r.num_tokens, r.hidden_dim});
      });

  py::class_<ManifestEntry>(m, "ManifestEntry")
      .def(py::init([](std::uint64_t record_id, std::string item_id,
                       const std::string& role, std::string phrase_text,
                       const std::string& context_mode,
                       std::optional<std::pair<std::uint32_t, std::uint32_t>>
                           head_span) {
             ManifestEntry e;
             e.record_id = record_id;
             e.item_id = std::move(item_id);
             e.role = parse_record_role(role);
             e.phrase_text = std::move(phrase_text);
             e.context_mode = parse_context_mode(context_mode);
             if (head_span) e.head_span = TokenSpan{head_span->first, head_span->second};
             return e;
           }),
           py::arg("record_id"), py::arg("item_id"), py::arg("role"),
           py::arg("phrase_text"), py::arg("context_mode") = "phrase-only",
           py::arg("head_span") = py::none())
      .def_readonly("record_id", &ManifestEntry::record_id)
      .def_readonly("item_id", &ManifestEntry::item_id)
      .def_readonly("phrase_text", &ManifestEntry::phrase_text)
      .def_property_readonly("role",
                             [](const ManifestEntry& e) {
                               return std::string(to_string(e.role));
                             })
      .def_property_readonly("context_mode",
                             [](const ManifestEntry& e) {
                               return std::string(to_string(e.context_mode));
                             })
      .def_property_readonly("head_span", [](const ManifestEntry& e) -> py::object {
        if (!e.head_span) return py::none();
        return py::make_tuple(e.head_span->start, e.head_span->end);
      });

  py::class_<Dump>(m, "Dump")
      .def(py::init([](std::uint32_t hidden_dim, std::uint32_t num_layers,
                       std::vector<SequenceRecord> records,
                       std::vector<ManifestEntry> manifest) {
             Dump d;
             d.header.hidden_dim = hidden_dim;
             d.header.num_layers = num_layers;
             d.header.num_records = records.size();
             d.records = std::move(records);
             d.manifest = std::move(manifest);
             return d;
           }),
           py::arg("hidden_dim"), py::arg("num_layers"), py::arg("records"),
           py::arg("manifest") = std::vector<ManifestEntry>{})
      .def_property_readonly("hidden_dim",
                             [](const Dump& d) { return d.header.hidden_dim; })
      .def_property_readonly("num_layers",
                             [](const Dump& d) { return d.header.num_layers; })
      .def_property_readonly("num_records",
                             [](const Dump& d) { return d.header.num_records; })
      .def_readonly("records", &Dump::records)
      .def_readonly("manifest", &Dump::manifest)
      .def("to_bytes", [](const Dump& d) {
        std::ostringstream out;
        write_dump_binary(d, out);
        return py::bytes(out.str());
      });

  m.def("write_dump", &write_dump, py::arg("dump"), py::arg("path"),
        "Write the binary dump and its manifest sidecar.");
  m.def("read_dump", &read_dump, py::arg("path"));
  m.def("validate_dump",
        [](const Dump& d) { return diagnostics_to_py(validate_dump(d)); });
  m.def("validate_dump_file", [](const std::filesystem::path& p) {
    return diagnostics_to_py(validate_dump_file(p));
  });

  m.def(
      "pool",
      [](const SequenceRecord& r, std::uint32_t layer, const std::string& repr,
         std::optional<std::pair<std::uint32_t, std::uint32_t>> head_span) {
        std::optional<TokenSpan> head;
        if (head_span) head = TokenSpan{head_span->first, head_span->second};
        const auto v = pool(r, layer, parse_repr(repr), head);
        return to_numpy(v.values, {static_cast<py::ssize_t>(v.values.size())});
      },
      py::arg("record"), py::arg("layer"), py::arg("repr"),
      py::arg("head_span") = py::none());

  m.def("cosine", [](const FloatArray& u, const FloatArray& v) {
    return cosine({u.data(), static_cast<std::size_t>(u.size())},
                  {v.data(), static_cast<std::size_t>(v.size())});
  });
  m.def("pearson", [](const DoubleArray& x, const DoubleArray& y) {
    return pearson({x.data(), static_cast<std::size_t>(x.size())},
                   {y.data(), static_cast<std::size_t>(y.size())});
  });
  m.def("word_overlap", [](const std::string& a, const std::string& b) {
    return word_overlap(tokenize(a), tokenize(b));
  });
  m.def("is_abba", [](const std::string& a, const std::string& b) {
    return is_abba(tokenize(a), tokenize(b));
  });
  m.def("load_bird", [](const std::filesystem::path& path) {
    py::list out;
    for (const auto& it : load_bird(path)) {
      out.append(py::make_tuple(it.item_id, join(it.source), join(it.target),
                                it.score));
    }
    return out;
  });

  m.def(
      "train_probe",
      [](const DoubleArray& train_x, const std::vector<int>& train_y,
         const DoubleArray& test_x, const std::vector<int>& test_y,
         std::uint64_t seed, std::uint32_t epochs, std::uint32_t hidden_units) {
        TrainConfig config;
        config.seed = seed;
        config.epochs = epochs;
        config.hidden_units = hidden_units;
        const auto model = train_features(to_features(train_x, train_y), config);
        return evaluate_features(model, to_features(test_x, test_y));
      },
      py::arg("train_x"), py::arg("train_y"), py::arg("test_x"),
      py::arg("test_y"), py::arg("seed") = 0, py::arg("epochs") = 30,
      py::arg("hidden_units") = 256,
      "Train the paraphrase probe on (n, dim) features; returns test accuracy.");

  m.def(
      "analyze",
      [](const std::string& config_json) {
        RunConfig config;
        apply_json(nlohmann::json::parse(config_json), config);
        std::ostringstream log;
        const auto written = cmd_analyze(config, log);
        return py::make_tuple(written.dump(), log.str());
      },
      py::arg("config_json"),
      "Run `phrprobe analyze` from a JSON config; returns (written, log).");
}
