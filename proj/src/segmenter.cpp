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

#include "ssmgen/segmenter.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace ssmgen::segmenter {

// ---------------------------------------------------------------------------
// Features

std::vector<std::size_t> FeatureConfig::neighborhoods() const {
  std::vector<std::size_t> out{k_local};
  out.insert(out.end(), scales.begin(), scales.end());
  return out;
}

std::size_t FeatureConfig::largest_neighborhood() const {
  const auto all = neighborhoods();
  return *std::max_element(all.begin(), all.end());
}

std::size_t FeatureConfig::dimension() const { return neighborhoods().size() * kFeaturesPerScale + 1; }

void FeatureConfig::validate(std::size_t n_points) const {
  if (k_local < 4) throw Error("segmenter.features", "k_local must be at least 4", ErrorKind::usage);
  for (std::size_t k : neighborhoods()) {
    if (k < 4) throw Error("segmenter.features", "neighbourhood sizes must be at least 4", ErrorKind::usage);
    if (k > n_points) {
      throw Error("segmenter.features", "neighbourhood of " + std::to_string(k) + " exceeds cloud size " +
                                            std::to_string(n_points));
    }
  }
}

Eigen::MatrixXd extract_features(const PointCloud& cloud, const FeatureConfig& config) {
  const std::size_t n = cloud.size();
  config.validate(n);
  const auto scales = config.neighborhoods();
  const std::size_t kmax = config.largest_neighborhood();
  const auto table = datagen::knn_table(cloud, kmax);
  const Points& p = cloud.points();

  const Eigen::RowVector3d centroid = p.colwise().mean();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) radius = std::max(radius, (p.row(i) - centroid).norm());
  const double inv_radius = radius > 0.0 ? 1.0 / radius : 0.0;

  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(config.dimension()));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const Eigen::RowVector3d point = p.row(row);
    const Eigen::RowVector3d outward = point - centroid;
    const double outward_norm = outward.norm();
    const std::size_t* nbrs = table.data() + i * kmax;

    for (std::size_t s = 0; s < scales.size(); ++s) {
      const std::size_t k = scales[s];
      const auto col = static_cast<Eigen::Index>(s * kFeaturesPerScale);

      Eigen::RowVector3d local_mean = Eigen::RowVector3d::Zero();
      double dist_sum = 0.0;
      double dist_max = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const Eigen::RowVector3d q = p.row(static_cast<Eigen::Index>(nbrs[j]));
        local_mean += q;
        const double d = (q - point).norm();
        dist_sum += d;
        dist_max = std::max(dist_max, d);
      }
      local_mean /= static_cast<double>(k);

      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (std::size_t j = 0; j < k; ++j) {
        const Eigen::RowVector3d d = p.row(static_cast<Eigen::Index>(nbrs[j])) - local_mean;
        cov += d.transpose() * d;
      }
      cov /= static_cast<double>(k);

      solver.compute(cov, Eigen::EigenvaluesOnly);
      // Ascending from the solver; clamp round-off negatives.
      const double l3 = std::max(solver.eigenvalues()(0), 0.0);
      const double l2 = std::max(solver.eigenvalues()(1), 0.0);
      const double l1 = std::max(solver.eigenvalues()(2), 0.0);
      const double sum = l1 + l2 + l3;
      if (l1 <= 0.0 || sum <= 1e-24 * radius * radius) continue;  // coincident points: zero block

      features(row, col + 0) = l1 / sum;
      features(row, col + 1) = l2 / sum;
      features(row, col + 2) = l3 / sum;
      features(row, col + 3) = (l1 - l2) / l1;
      features(row, col + 4) = (l2 - l3) / l1;
      features(row, col + 5) = l3 / l1;
      features(row, col + 6) = dist_sum / static_cast<double>(k) * inv_radius;
      features(row, col + 7) = dist_max * inv_radius;
      if (outward_norm > 0.0) features(row, col + 8) = (point - local_mean).dot(outward) / outward_norm * inv_radius;
    }
    features(row, static_cast<Eigen::Index>(config.dimension() - 1)) = outward_norm * inv_radius;
  }
  return features;
}

// ---------------------------------------------------------------------------
// Network

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw Error("segmenter.network", "network needs at least an input and an output layer");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw Error("segmenter.network", "layer sizes must be positive");
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
}

void Mlp::initialize(Rng& rng) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t count = sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    for (std::size_t i = 0; i < count; ++i) {
      params_(static_cast<Eigen::Index>(offsets_[l] + i)) = rng.uniform(-bound, bound);
    }
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weights(std::size_t layer) const {
  return {params_.data() + weight_offset(layer), static_cast<Eigen::Index>(sizes_[layer + 1]),
          static_cast<Eigen::Index>(sizes_[layer])};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(std::size_t layer) const {
  return {params_.data() + bias_offset(layer), static_cast<Eigen::Index>(sizes_[layer + 1])};
}

Eigen::MatrixXd Mlp::logits(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != static_cast<Eigen::Index>(input_dim())) {
    throw Error("segmenter.dimension", "network expects " + std::to_string(input_dim()) + " features, got " +
                                           std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = a * weights(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

}  // namespace

Eigen::MatrixXd Mlp::probabilities(const Eigen::MatrixXd& inputs) const { return softmax_rows(logits(inputs)); }

Mlp::LossGradient Mlp::loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> targets,
                                         const Eigen::VectorXd& class_weights) const {
  const auto n = inputs.rows();
  if (static_cast<std::size_t>(n) != targets.size()) {
    throw Error("segmenter.dimension", "feature rows and targets differ in count");
  }
  if (inputs.cols() != static_cast<Eigen::Index>(input_dim())) {
    throw Error("segmenter.dimension", "network expects " + std::to_string(input_dim()) + " features, got " +
                                           std::to_string(inputs.cols()));
  }

  // Forward, keeping activations.
  std::vector<Eigen::MatrixXd> acts{inputs};
  for (std::size_t l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = acts.back() * weights(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd prob = softmax_rows(acts.back());
  const Eigen::MatrixXd log_prob = [&] {
    const Eigen::MatrixXd& z = acts.back();
    Eigen::MatrixXd shifted = z.colwise() - z.rowwise().maxCoeff();
    const Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log();
    return Eigen::MatrixXd(shifted.colwise() - lse);
  }();

  double weight_sum = 0.0;
  double loss = 0.0;
  Eigen::MatrixXd delta = prob;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = targets[static_cast<std::size_t>(i)];
    if (y < 0 || y >= static_cast<int>(output_dim())) {
      throw Error("segmenter.classes", "target class " + std::to_string(y) + " outside network output range");
    }
    const double w = class_weights(y);
    weight_sum += w;
    loss -= w * log_prob(i, y);
    delta(i, y) -= 1.0;
    delta.row(i) *= w;
  }
  if (!(weight_sum > 0.0)) throw Error("segmenter.classes", "total class weight of the batch is zero");
  loss /= weight_sum;
  delta /= weight_sum;

  LossGradient out{loss, Eigen::VectorXd::Zero(params_.size())};
  for (std::size_t l = layer_count(); l-- > 0;) {
    const Eigen::MatrixXd& a_in = acts[l];
    Eigen::Map<Eigen::MatrixXd> gw(out.gradient.data() + weight_offset(l), static_cast<Eigen::Index>(sizes_[l + 1]),
                                   static_cast<Eigen::Index>(sizes_[l]));
    Eigen::Map<Eigen::VectorXd> gb(out.gradient.data() + bias_offset(l), static_cast<Eigen::Index>(sizes_[l + 1]));
    gw.noalias() = delta.transpose() * a_in;
    gb = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * weights(l);
      back = (a_in.array() > 0.0).select(back, 0.0);
      delta = std::move(back);
    }
  }
  return out;
}

double Mlp::loss(const Eigen::MatrixXd& inputs, std::span<const int> targets, const Eigen::VectorXd& class_weights) const {
  const Eigen::MatrixXd z = logits(inputs);
  Eigen::MatrixXd shifted = z.colwise() - z.rowwise().maxCoeff();
  const Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log();
  double weight_sum = 0.0;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const int y = targets[static_cast<std::size_t>(i)];
    const double w = class_weights(y);
    weight_sum += w;
    loss -= w * (shifted(i, y) - lse(i));
  }
  return weight_sum > 0.0 ? loss / weight_sum : 0.0;
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Prepared {
  std::vector<Eigen::MatrixXd> features;
  std::vector<std::vector<int>> targets;
};

Prepared prepare(const std::vector<datagen::LabeledCloud>& clouds, const FeatureConfig& config, unsigned workers) {
  Prepared out;
  out.features.resize(clouds.size());
  out.targets.resize(clouds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < clouds.size();) {
      out.features[i] = extract_features(clouds[i].cloud, config);
      out.targets[i].assign(clouds[i].labels.labels().begin(), clouds[i].labels.labels().end());
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(clouds.size(), 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

Eigen::MatrixXd stack(const Prepared& data, std::span<const std::size_t> items, std::vector<int>& targets) {
  Eigen::Index rows = 0;
  for (std::size_t i : items) rows += data.features[i].rows();
  Eigen::MatrixXd x(rows, data.features.front().cols());
  targets.clear();
  Eigen::Index at = 0;
  for (std::size_t i : items) {
    x.middleRows(at, data.features[i].rows()) = data.features[i];
    at += data.features[i].rows();
    targets.insert(targets.end(), data.targets[i].begin(), data.targets[i].end());
  }
  return x;
}

void standardize(Prepared& data, const Eigen::VectorXd& mean, const Eigen::VectorXd& scale) {
  for (auto& f : data.features) f = (f.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

}  // namespace

Eigen::VectorXd class_weights(const std::vector<datagen::LabeledCloud>& clouds, std::size_t class_count, double cap) {
  std::vector<double> counts(class_count, 0.0);
  for (const auto& c : clouds) {
    for (ClassId id : c.labels.labels()) {
      if (id >= 0 && static_cast<std::size_t>(id) < class_count) counts[static_cast<std::size_t>(id)] += 1.0;
    }
  }
  const double most = *std::max_element(counts.begin(), counts.end());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(class_count));
  for (std::size_t c = 0; c < class_count; ++c) {
    if (counts[c] > 0.0) w(static_cast<Eigen::Index>(c)) = std::min(cap, most / counts[c]);
  }
  return w;
}

Eigen::MatrixXd SegmenterModel::network_inputs(const PointCloud& cloud) const {
  const Eigen::MatrixXd f = extract_features(cloud, features);
  if (f.cols() != feature_mean.size()) {
    throw Error("segmenter.dimension", "feature dimension " + std::to_string(f.cols()) +
                                           " does not match the model's " + std::to_string(feature_mean.size()));
  }
  return (f.rowwise() - feature_mean.transpose()).array().rowwise() / feature_scale.transpose().array();
}

SegmenterModel train(const std::vector<datagen::LabeledCloud>& train_set, const std::vector<datagen::LabeledCloud>& val_set,
                     const TrainOptions& options) {
  if (train_set.empty()) throw Error("segmenter.data", "training split is empty");
  if (options.batch_size == 0) throw Error("segmenter.options", "batch size must be positive", ErrorKind::usage);
  if (!(options.lr > 0.0)) throw Error("segmenter.options", "learning rate must be positive", ErrorKind::usage);

  const ClassTable& classes = train_set.front().labels.class_table();
  if (!classes.is_contiguous()) {
    throw Error("segmenter.classes", "class ids must be contiguous from 0 for training");
  }
  for (const auto* set : {&train_set, &val_set}) {
    for (const auto& c : *set) {
      if (!(c.labels.class_table() == classes)) {
        throw Error("segmenter.classes", "shape " + std::to_string(c.shape_id) + " uses a different class table");
      }
      options.features.validate(c.cloud.size());
    }
  }

  Prepared train_data = prepare(train_set, options.features, options.workers);
  Prepared val_data = prepare(val_set, options.features, options.workers);

  const auto dim = train_data.features.front().cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
  double rows = 0.0;
  for (const auto& f : train_data.features) {
    mean += f.colwise().sum().transpose();
    rows += static_cast<double>(f.rows());
  }
  mean /= rows;
  for (const auto& f : train_data.features) sq += (f.rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
  Eigen::VectorXd scale = (sq / rows).array().sqrt();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (!(scale(j) > 1e-12)) scale(j) = 1.0;
  }
  standardize(train_data, mean, scale);
  standardize(val_data, mean, scale);

  SegmenterModel model;
  model.features = options.features;
  model.feature_mean = mean;
  model.feature_scale = scale;
  model.classes = classes;

  std::vector<std::size_t> sizes{static_cast<std::size_t>(dim)};
  sizes.insert(sizes.end(), options.hidden.begin(), options.hidden.end());
  sizes.push_back(classes.size());
  model.network = Mlp(sizes);

  Rng rng(options.seed);
  model.network.initialize(rng);

  const Eigen::VectorXd weights = class_weights(train_set, classes.size(), options.class_weight_cap);
  model.metadata.seed = options.seed;
  model.metadata.epochs = options.epochs;
  model.metadata.lr = options.lr;
  model.metadata.batch_size = options.batch_size;
  model.metadata.class_weights = weights;

  Adam adam(static_cast<std::size_t>(model.network.parameters().size()), options.lr);
  std::vector<int> targets;

  std::vector<std::size_t> all_val(val_data.features.size());
  for (std::size_t i = 0; i < all_val.size(); ++i) all_val[i] = i;
  std::vector<int> val_targets;
  const Eigen::MatrixXd val_x = all_val.empty() ? Eigen::MatrixXd() : stack(val_data, all_val, val_targets);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto order = rng.permutation(train_data.features.size());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      const Eigen::MatrixXd x = stack(train_data, std::span(order).subspan(start, end - start), targets);
      const auto lg = model.network.loss_and_gradient(x, targets, weights);
      if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
        throw Error("segmenter.diverged", "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                              std::to_string(batches) + " (loss=" + format_double(lg.loss) + ")",
                    ErrorKind::internal);
      }
      adam.step(model.network.parameters(), lg.gradient);
      loss_sum += lg.loss;
      ++batches;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(batches);
    stats.val_loss = all_val.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : model.network.loss(val_x, val_targets, weights);
    model.metadata.train_loss.push_back(stats.train_loss);
    model.metadata.val_loss.push_back(stats.val_loss);
    if (options.on_epoch) options.on_epoch(stats);
  }
  return model;
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

LabelMap predict(const SegmenterModel& model, const PointCloud& cloud) {
  const Eigen::MatrixXd scores = model.network.logits(model.network_inputs(cloud));
  return LabelMap(argmax_rows(scores), model.classes);
}

// ---------------------------------------------------------------------------
// Model file

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string model_to_json(const SegmenterModel& model) {
  using nlohmann::json;
  auto nan_safe = [](const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(std::isfinite(x) ? json(x) : json());
    return arr;
  };
  json doc = {
      {"format", "ssmgen-segmenter"},
      {"version", kSegmenterFormatVersion},
      {"features", {{"k_local", model.features.k_local}, {"scales", model.features.scales}}},
      {"layer_sizes", model.network.layer_sizes()},
      {"parameters", to_std(model.network.parameters())},
      {"feature_mean", to_std(model.feature_mean)},
      {"feature_scale", to_std(model.feature_scale)},
      {"classes", json::parse(class_table_to_json(model.classes)).at("classes")},
      {"training",
       {{"seed", model.metadata.seed},
        {"epochs", model.metadata.epochs},
        {"lr", model.metadata.lr},
        {"batch_size", model.metadata.batch_size},
        {"optimizer", "adam(beta1=0.9, beta2=0.999, eps=1e-8)"},
        {"class_weights", to_std(model.metadata.class_weights)},
        {"train_loss", nan_safe(model.metadata.train_loss)},
        {"val_loss", nan_safe(model.metadata.val_loss)}}}};
  return doc.dump() + "\n";
}

SegmenterModel model_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "ssmgen-segmenter") {
      throw Error("segmenter.model_file", "not an ssmgen segmenter model");
    }
    if (doc.at("version").get<int>() != kSegmenterFormatVersion) {
      throw Error("segmenter.model_file", "unsupported model version " + doc.at("version").dump());
    }
    SegmenterModel model;
    model.features.k_local = doc.at("features").at("k_local").get<std::size_t>();
    model.features.scales = doc.at("features").at("scales").get<std::vector<std::size_t>>();
    model.network = Mlp(doc.at("layer_sizes").get<std::vector<std::size_t>>());
    const auto params = doc.at("parameters").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(params.size()) != model.network.parameters().size()) {
      throw Error("segmenter.model_file", "parameter count does not match layer sizes");
    }
    model.network.parameters() = to_eigen(params);
    model.feature_mean = to_eigen(doc.at("feature_mean").get<std::vector<double>>());
    model.feature_scale = to_eigen(doc.at("feature_scale").get<std::vector<double>>());
    model.classes = class_table_from_json(nlohmann::json{{"classes", doc.at("classes")}}.dump());
    if (model.feature_mean.size() != static_cast<Eigen::Index>(model.network.input_dim()) ||
        model.feature_scale.size() != model.feature_mean.size() ||
        model.network.input_dim() != model.features.dimension() ||
        model.network.output_dim() != model.classes.size()) {
      throw Error("segmenter.model_file", "layer sizes, feature configuration and class table disagree");
    }
    const auto& tr = doc.at("training");
    model.metadata.seed = tr.at("seed").get<std::uint64_t>();
    model.metadata.epochs = tr.at("epochs").get<std::size_t>();
    model.metadata.lr = tr.at("lr").get<double>();
    model.metadata.batch_size = tr.at("batch_size").get<std::size_t>();
    model.metadata.class_weights = to_eigen(tr.at("class_weights").get<std::vector<double>>());
    for (const auto& x : tr.at("train_loss")) {
      model.metadata.train_loss.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
    }
    for (const auto& x : tr.at("val_loss")) {
      model.metadata.val_loss.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error("segmenter.model_file", std::string("malformed model file: ") + e.what());
  }
}

void save_model(const SegmenterModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

SegmenterModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace ssmgen::segmenter
