// Copyright (c) 2026 The ssmgen Authors
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

#pragma once

#include "ssmgen/datagen.hpp"
#include "ssmgen/labels.hpp"
#include "ssmgen/mesh.hpp"
#include "ssmgen/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ssmgen::segmenter {

/// Neighbourhood sizes for the per-point descriptors. Descriptors are
/// computed for `k_local` and for every entry of `scales`.
struct FeatureConfig {
  std::size_t k_local = 16;
  std::vector<std::size_t> scales{32, 64};

  std::vector<std::size_t> neighborhoods() const;
  std::size_t largest_neighborhood() const;
  std::size_t dimension() const;
  /// Throws "segmenter.features" if k_local < 4 or a neighbourhood exceeds n_points.
  void validate(std::size_t n_points) const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// Values per neighbourhood: 3 normalized eigenvalues, linearity, planarity,
/// sphericity, mean and max neighbour distance, and the signed offset of the
/// point from its neighbourhood centroid along the outward direction.
inline constexpr std::size_t kFeaturesPerScale = 9;

/// n_points x D matrix of rigid-motion-invariant descriptors.
///
/// Every quantity is built from distances and covariance spectra, so the
/// result is unchanged by rotation and translation of the cloud. Lengths are
/// divided by the bounding-sphere radius (largest distance from the
/// centroid). A neighbourhood whose points all coincide yields a zero block.
Eigen::MatrixXd extract_features(const PointCloud& cloud, const FeatureConfig& config);

/// Fully connected ReLU network with a softmax head. Parameters live in one
/// flat vector: for each layer, the weight matrix (out x in, column-major)
/// followed by the bias.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> layer_sizes);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  void initialize(Rng& rng);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }

  Eigen::VectorXd& parameters() noexcept { return params_; }
  const Eigen::VectorXd& parameters() const noexcept { return params_; }

  /// Class logits, one row per input row.
  Eigen::MatrixXd logits(const Eigen::MatrixXd& inputs) const;
  /// Row-wise softmax of the logits.
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& inputs) const;

  struct LossGradient {
    double loss = 0.0;
    Eigen::VectorXd gradient;  ///< same layout as parameters()
  };

  /// Weighted mean cross-entropy sum_i w[y_i] * -log p_i[y_i] / sum_i w[y_i]
  /// and its gradient with respect to every parameter.
  LossGradient loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> targets,
                                 const Eigen::VectorXd& class_weights) const;
  double loss(const Eigen::MatrixXd& inputs, std::span<const int> targets, const Eigen::VectorXd& class_weights) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + sizes_[layer + 1] * sizes_[layer]; }
  Eigen::Map<const Eigen::MatrixXd> weights(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  Eigen::VectorXd params_;
};

/// Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  std::size_t t_ = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;  ///< mean of the batch losses seen during the epoch
  double val_loss = 0.0;    ///< full validation loss after the epoch (NaN without a validation split)
};

struct TrainOptions {
  double lr = 1e-3;
  std::size_t batch_size = 12;  ///< clouds per optimizer step
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden{64, 64};
  double class_weight_cap = 20.0;
  FeatureConfig features;
  unsigned workers = 1;  ///< feature extraction threads; results do not depend on it
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double lr = 0.0;
  std::size_t batch_size = 0;
  Eigen::VectorXd class_weights;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
};

struct SegmenterModel {
  FeatureConfig features;
  Eigen::VectorXd feature_mean;   ///< input standardization, from the training split
  Eigen::VectorXd feature_scale;
  Mlp network;
  ClassTable classes;
  TrainingMetadata metadata;

  /// Standardized features of a cloud, ready for the network.
  Eigen::MatrixXd network_inputs(const PointCloud& cloud) const;
};

/// Inverse class frequency, scaled so the most frequent class weighs 1 and
/// capped at `cap`. Classes absent from the data weigh 1.
Eigen::VectorXd class_weights(const std::vector<datagen::LabeledCloud>& clouds, std::size_t class_count, double cap);

/// Trains on `train` with Adam. Deterministic given options.seed. Throws
/// "segmenter.diverged" on a non-finite loss and "segmenter.classes" when the
/// class table is not 0..C-1 or differs between clouds.
SegmenterModel train(const std::vector<datagen::LabeledCloud>& train, const std::vector<datagen::LabeledCloud>& val,
                     const TrainOptions& options);

/// Per-point argmax of the class scores; ties go to the lowest class id.
LabelMap predict(const SegmenterModel& model, const PointCloud& cloud);
std::vector<int> argmax_rows(const Eigen::MatrixXd& scores);

inline constexpr int kSegmenterFormatVersion = 1;
std::string model_to_json(const SegmenterModel& model);
SegmenterModel model_from_json(const std::string& text);
void save_model(const SegmenterModel& model, const std::filesystem::path& path);
SegmenterModel load_model(const std::filesystem::path& path);

}  // namespace ssmgen::segmenter
