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

#include "phrprobe/classifier.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include "phrprobe/error.h"
#include "phrprobe/parallel.h"
#include "phrprobe/rng.h"
#include "little_endian.h"

namespace phrprobe {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_input(const ClassifierModel& model, std::span<const double> x) {
  if (static_cast<Index>(x.size()) != model.input_dim()) {
    throw Error("dimension_mismatch",
                "feature has " + std::to_string(x.size()) +
                    " values, model expects " +
                    std::to_string(model.input_dim()));
  }
}

VectorXd prepare(const ClassifierModel& model, std::span<const double> x) {
  check_input(model, x);
  VectorXd v = Eigen::Map<const VectorXd>(x.data(), static_cast<Index>(x.size()));
  if (model.feature_mean.size() == v.size()) {
    v = (v - model.feature_mean).cwiseQuotient(model.feature_scale);
  }
  return v;
}

// Column-wise numerically stable softmax of 2 x B logits.
MatrixXd softmax(const MatrixXd& logits) {
  MatrixXd p(logits.rows(), logits.cols());
  for (Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    const VectorXd e = (logits.col(c).array() - m).exp();
    p.col(c) = e / e.sum();
  }
  return p;
}

struct BatchPass {
  MatrixXd pre;     // hidden x B
  MatrixXd hidden;  // relu(pre)
  MatrixXd probs;   // 2 x B
};

BatchPass run_batch(const ClassifierModel& m, const MatrixXd& x) {
  BatchPass pass;
  pass.pre = (m.w1 * x).colwise() + m.b1;
  pass.hidden = pass.pre.cwiseMax(0.0);
  pass.probs = softmax((m.w2 * pass.hidden).colwise() + m.b2);
  return pass;
}

double batch_loss(const BatchPass& pass, const std::vector<int>& labels) {
  double loss = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const double p = pass.probs(labels[c], static_cast<Index>(c));
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(labels.size());
}

Gradients batch_gradients(const ClassifierModel& m, const MatrixXd& x,
                          const BatchPass& pass,
                          const std::vector<int>& labels) {
  const double scale = 1.0 / static_cast<double>(labels.size());
  MatrixXd dlogits = pass.probs;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    dlogits(labels[c], static_cast<Index>(c)) -= 1.0;
  }
  dlogits *= scale;
  Gradients g;
  g.w2 = dlogits * pass.hidden.transpose();
  g.b2 = dlogits.rowwise().sum();
  MatrixXd dhidden = m.w2.transpose() * dlogits;
  dhidden = dhidden.cwiseProduct(
      (pass.pre.array() > 0.0).cast<double>().matrix());
  g.w1 = dhidden * x.transpose();
  g.b1 = dhidden.rowwise().sum();
  return g;
}

template <typename Tensor>
void adam_step(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v,
               const TrainConfig& c, double correction1, double correction2) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  param.array() -= c.learning_rate * (m.array() / correction1) /
                   ((v.array() / correction2).sqrt() + c.epsilon);
}

}  // namespace

ClassifierModel init_model(Index input_dim, Index hidden_units,
                           std::uint64_t seed) {
  Rng rng(seed);
  ClassifierModel m;
  auto fill = [&](auto& tensor, double bound) {
    for (Index i = 0; i < tensor.size(); ++i) {
      tensor.data()[i] = rng.uniform(-bound, bound);
    }
  };
  const double b_in = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double b_hidden = 1.0 / std::sqrt(static_cast<double>(hidden_units));
  m.w1.resize(hidden_units, input_dim);
  m.b1.resize(hidden_units);
  m.w2.resize(2, hidden_units);
  m.b2.resize(2);
  fill(m.w1, b_in);
  fill(m.b1, b_in);
  fill(m.w2, b_hidden);
  fill(m.b2, b_hidden);
  m.seed = seed;
  return m;
}

std::array<double, 2> forward(const ClassifierModel& model,
                              std::span<const double> feature) {
  const VectorXd x = prepare(model, feature);
  const VectorXd hidden = (model.w1 * x + model.b1).cwiseMax(0.0);
  const VectorXd logits = model.w2 * hidden + model.b2;
  const double m = logits.maxCoeff();
  const double e0 = std::exp(logits(0) - m);
  const double e1 = std::exp(logits(1) - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double cross_entropy(const ClassifierModel& model,
                     std::span<const double> feature, Label label) {
  const auto p = forward(model, feature);
  return -std::log(std::max(p[static_cast<int>(label)], 1e-300));
}

Gradients backprop(const ClassifierModel& model,
                   std::span<const double> feature, Label label) {
  const MatrixXd x = prepare(model, feature);
  const std::vector<int> labels = {static_cast<int>(label)};
  return batch_gradients(model, x, run_batch(model, x), labels);
}

double gradient_check(const ClassifierModel& model,
                      std::span<const double> feature, Label label,
                      const GradientFn& analytic,
                      std::size_t samples_per_tensor, std::uint64_t seed) {
  constexpr double kStep = 1e-5;
  const Gradients g = analytic(model, feature, label);
  ClassifierModel probe = model;
  Rng rng(seed);
  double worst = 0.0;

  auto check = [&](double* params, const double* grads, Index size) {
    std::vector<Index> indices;
    if (static_cast<std::size_t>(size) <= samples_per_tensor) {
      for (Index i = 0; i < size; ++i) indices.push_back(i);
    } else {
      for (std::size_t k = 0; k < samples_per_tensor; ++k) {
        indices.push_back(static_cast<Index>(rng.below(size)));
      }
    }
    for (Index i : indices) {
      const double saved = params[i];
      params[i] = saved + kStep;
      const double up = cross_entropy(probe, feature, label);
      params[i] = saved - kStep;
      const double down = cross_entropy(probe, feature, label);
      params[i] = saved;
      const double numeric = (up - down) / (2.0 * kStep);
      const double denom =
          std::max({std::abs(grads[i]), std::abs(numeric), 1e-4});
      worst = std::max(worst, std::abs(grads[i] - numeric) / denom);
    }
  };
  check(probe.w1.data(), g.w1.data(), probe.w1.size());
  check(probe.b1.data(), g.b1.data(), probe.b1.size());
  check(probe.w2.data(), g.w2.data(), probe.w2.size());
  check(probe.b2.data(), g.b2.data(), probe.b2.size());
  return worst;
}

ClassifierModel train_features(const FeatureSet& data,
                               const TrainConfig& config) {
  const auto n = static_cast<std::size_t>(data.inputs.cols());
  if (data.labels.size() != n) {
    throw Error("dimension_mismatch", "labels and inputs differ in count");
  }
  const auto positives = static_cast<std::size_t>(
      std::count(data.labels.begin(), data.labels.end(), Label::kPositive));
  if (positives < 2 || n - positives < 2) {
    throw Error("class_missing",
                "training data needs >= 2 examples per class (have " +
                    std::to_string(positives) + " positive, " +
                    std::to_string(n - positives) + " negative)");
  }
  if (config.epochs == 0 || config.batch_size == 0 ||
      config.hidden_units == 0 || !(config.learning_rate > 0.0)) {
    throw Error("bad_config", "training hyperparameters must be positive");
  }

  ClassifierModel model =
      init_model(data.inputs.rows(), config.hidden_units, config.seed);
  model.epochs = config.epochs;

  MatrixXd inputs = data.inputs;
  if (config.standardize) {
    model.feature_mean = inputs.rowwise().mean();
    model.feature_scale.resize(inputs.rows());
    for (Index r = 0; r < inputs.rows(); ++r) {
      const double var =
          (inputs.row(r).array() - model.feature_mean(r)).square().mean();
      model.feature_scale(r) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    inputs = (inputs.colwise() - model.feature_mean).array().colwise() /
             model.feature_scale.array();
  }

  Gradients m1{MatrixXd::Zero(model.w1.rows(), model.w1.cols()),
               VectorXd::Zero(model.b1.size()),
               MatrixXd::Zero(model.w2.rows(), model.w2.cols()),
               VectorXd::Zero(model.b2.size())};
  Gradients m2 = m1;

  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::uint64_t step = 0;
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t b = std::min<std::size_t>(config.batch_size, n - start);
      MatrixXd x(inputs.rows(), static_cast<Index>(b));
      std::vector<int> labels(b);
      for (std::size_t k = 0; k < b; ++k) {
        x.col(static_cast<Index>(k)) = inputs.col(static_cast<Index>(order[start + k]));
        labels[k] = static_cast<int>(data.labels[order[start + k]]);
      }
      const BatchPass pass = run_batch(model, x);
      epoch_loss += batch_loss(pass, labels) * static_cast<double>(b);
      const Gradients g = batch_gradients(model, x, pass, labels);
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      adam_step(model.w1, g.w1, m1.w1, m2.w1, config, c1, c2);
      adam_step(model.b1, g.b1, m1.b1, m2.b1, config, c1, c2);
      adam_step(model.w2, g.w2, m1.w2, m2.w2, config, c1, c2);
      adam_step(model.b2, g.b2, m1.b2, m2.b2, config, c1, c2);
    }
    model.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
  }
  model.final_train_loss = model.epoch_losses.back();
  return model;
}

Label predict(const ClassifierModel& model, std::span<const double> feature) {
  const auto p = forward(model, feature);
  return p[1] > p[0] ? Label::kPositive : Label::kNegative;
}

double evaluate_features(const ClassifierModel& model, const FeatureSet& data) {
  const auto n = static_cast<std::size_t>(data.inputs.cols());
  if (n == 0) throw Error("empty_test", "cannot evaluate on an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const VectorXd col = data.inputs.col(static_cast<Index>(i));
    const std::span<const double> x(col.data(), static_cast<std::size_t>(col.size()));
    if (predict(model, x) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

FeatureSet pair_features(const DumpSet& dumps,
                         const std::vector<ParaphraseItem>& items,
                         std::uint32_t layer, ReprType repr) {
  const Index d = dumps.hidden_dim();
  FeatureSet out;
  out.inputs.resize(2 * d, static_cast<Index>(items.size()));
  out.labels.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    auto src = dumps.find(item.item_id, RecordRole::kSource);
    auto trg = dumps.find(item.item_id, RecordRole::kTarget);
    if (!src || !trg) {
      throw Error("unresolved",
                  "item " + item.item_id + " has no source/target record");
    }
    auto [ps, pt] = pool_pair(*src->record, *trg->record, layer, repr,
                              src->head_span(), trg->head_span());
    for (Index k = 0; k < d; ++k) {
      out.inputs(k, static_cast<Index>(i)) = ps.values[static_cast<std::size_t>(k)];
      out.inputs(d + k, static_cast<Index>(i)) = pt.values[static_cast<std::size_t>(k)];
    }
    out.labels.push_back(item.label);
  }
  return out;
}

ClassifierModel train(const std::vector<ParaphraseItem>& items,
                      const DumpSet& dumps, std::uint32_t layer, ReprType repr,
                      const TrainConfig& config) {
  return train_features(pair_features(dumps, items, layer, repr), config);
}

double evaluate(const ClassifierModel& model,
                const std::vector<ParaphraseItem>& items, const DumpSet& dumps,
                std::uint32_t layer, ReprType repr) {
  return evaluate_features(model, pair_features(dumps, items, layer, repr));
}

AccuracyGrid classification_sweep(const DumpSet& dumps,
                                  const std::vector<ParaphraseItem>& train_items,
                                  const std::vector<ParaphraseItem>& test_items,
                                  const std::vector<ReprType>& reprs,
                                  const TrainConfig& config, unsigned workers) {
  // Resolve everything up front so a missing record is a hard error rather
  // than an undefined cell.
  for (const auto* set : {&train_items, &test_items}) {
    for (const auto& item : *set) {
      if (!dumps.find(item.item_id, RecordRole::kSource) ||
          !dumps.find(item.item_id, RecordRole::kTarget)) {
        throw Error("unresolved",
                    "item " + item.item_id + " has no source/target record");
      }
    }
  }
  auto grid = AccuracyGrid::make(dumps.num_layers(), reprs);
  parallel_for(grid.cells.size(), workers, [&](std::size_t c) {
    const auto layer = static_cast<std::uint32_t>(c / reprs.size());
    const ReprType repr = reprs[c % reprs.size()];
    auto& cell = grid.cells[c];
    cell.extra.n_train = train_items.size();
    cell.extra.n_test = test_items.size();
    try {
      const ClassifierModel model =
          train(train_items, dumps, layer, repr, config);
      cell.extra.final_train_loss = model.final_train_loss;
      cell.value = evaluate(model, test_items, dumps, layer, repr);
    } catch (const Error& e) {
      cell.reason = e.what();
    }
  });
  return grid;
}

void write_model(const ClassifierModel& model,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot open " + path.string());
  auto put_u32 = [&](std::uint32_t v) {
    v = internal::little_endian(v);
    out.write(reinterpret_cast<const char*>(&v), 4);
  };
  auto put_block = [&](const auto& tensor) {
    put_u32(static_cast<std::uint32_t>(tensor.rows()));
    put_u32(static_cast<std::uint32_t>(tensor.cols()));
    // Row-major order.
    for (Index r = 0; r < tensor.rows(); ++r) {
      for (Index c = 0; c < tensor.cols(); ++c) {
        const float bits = internal::little_endian(static_cast<float>(tensor(r, c)));
        out.write(reinterpret_cast<const char*>(&bits), 4);
      }
    }
  };
  out.write("PHRPRMLP", 8);
  put_block(model.w1);
  put_block(model.b1);
  put_block(model.w2);
  put_block(model.b2);
  if (!out) throw Error("io", "failed writing " + path.string());
}

}  // namespace phrprobe
