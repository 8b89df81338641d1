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

#ifndef PHRPROBE_CLASSIFIER_H_
#define PHRPROBE_CLASSIFIER_H_

// Paraphrase probe: a one-hidden-layer ReLU MLP with a two-way softmax over
// the concatenation [source; target] of pooled phrase vectors.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phrprobe/dataset.h"
#include "phrprobe/dump_set.h"
#include "phrprobe/grid.h"
#include "phrprobe/pooling.h"

namespace phrprobe {

struct TrainConfig {
  std::uint64_t seed = 0;
  std::uint32_t epochs = 30;
  std::uint32_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint32_t hidden_units = 256;
  // Per-feature standardization with training-set statistics.
  bool standardize = false;
};

struct ClassifierModel {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // 2 x hidden
  Eigen::VectorXd b2;
  // Empty unless trained with standardization.
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;

  std::uint64_t seed = 0;
  std::uint32_t epochs = 0;
  std::vector<double> epoch_losses;
  double final_train_loss = 0.0;

  Eigen::Index input_dim() const { return w1.cols(); }
  Eigen::Index hidden_units() const { return w1.rows(); }
};

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

// One column per example.
struct FeatureSet {
  Eigen::MatrixXd inputs;
  std::vector<Label> labels;
};

// Weights and biases uniform in +-1/sqrt(fan_in).
ClassifierModel init_model(Eigen::Index input_dim, Eigen::Index hidden_units,
                           std::uint64_t seed);

// Softmax probabilities (negative, positive).
std::array<double, 2> forward(const ClassifierModel& model,
                              std::span<const double> feature);

double cross_entropy(const ClassifierModel& model,
                     std::span<const double> feature, Label label);

Gradients backprop(const ClassifierModel& model,
                   std::span<const double> feature, Label label);

using GradientFn = std::function<Gradients(
    const ClassifierModel&, std::span<const double>, Label)>;

// Max over a seeded sample of parameters of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-4)
// with central differences of step 1e-5.
double gradient_check(const ClassifierModel& model,
                      std::span<const double> feature, Label label,
                      const GradientFn& analytic = backprop,
                      std::size_t samples_per_tensor = 64,
                      std::uint64_t seed = 0);

// Mini-batch Adam on mean cross-entropy. Throws Error("class_missing")
// unless both labels have at least two examples.
ClassifierModel train_features(const FeatureSet& data,
                               const TrainConfig& config);

// Positive iff p(positive) > p(negative); ties go to negative.
Label predict(const ClassifierModel& model, std::span<const double> feature);
double evaluate_features(const ClassifierModel& model, const FeatureSet& data);

// [pool(source); pool(target)] for every item at (layer, repr).
FeatureSet pair_features(const DumpSet& dumps,
                         const std::vector<ParaphraseItem>& items,
                         std::uint32_t layer, ReprType repr);

ClassifierModel train(const std::vector<ParaphraseItem>& items,
                      const DumpSet& dumps, std::uint32_t layer, ReprType repr,
                      const TrainConfig& config);

double evaluate(const ClassifierModel& model,
                const std::vector<ParaphraseItem>& items, const DumpSet& dumps,
                std::uint32_t layer, ReprType repr);

// One independently trained probe per (layer, repr) cell.
AccuracyGrid classification_sweep(const DumpSet& dumps,
                                  const std::vector<ParaphraseItem>& train,
                                  const std::vector<ParaphraseItem>& test,
                                  const std::vector<ReprType>& reprs,
                                  const TrainConfig& config,
                                  unsigned workers = 1);

// Parameters as little-endian float32 blocks: w1, b1, w2, b2, each preceded
// by u32 rows and u32 cols.
void write_model(const ClassifierModel& model, const std::filesystem::path& path);

}  // namespace phrprobe

#endif  // PHRPROBE_CLASSIFIER_H_
