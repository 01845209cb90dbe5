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

#include "ssmgen/ssm.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <json.hpp>

#include <cmath>

namespace ssmgen::ssm {

namespace {

Points centred(const Points& points) {
  const Eigen::RowVector3d centroid = points.colwise().mean();
  return points.rowwise() - centroid;
}

Points average(const std::vector<Points>& shapes) {
  Points sum = Points::Zero(shapes.front().rows(), 3);
  for (const Points& s : shapes) sum += s;
  return sum / static_cast<double>(shapes.size());
}

// Least-squares scale s minimizing |s * source - target|.
double best_scale(const Points& source, const Points& target) {
  const double denom = source.squaredNorm();
  return denom > 0.0 ? (source.array() * target.array()).sum() / denom : 1.0;
}

}  // namespace

Eigen::Matrix3d best_rotation(const Points& source, const Points& target) {
  const Eigen::Matrix3d cross = source.transpose() * target;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return v * d * u.transpose();
}

double rms_distance(const Points& a, const Points& b) {
  if (a.rows() == 0) return 0.0;
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
}

Alignment gpa_align(const Cohort& cohort, const GpaOptions& options) {
  const std::size_t k = cohort.size();
  if (k < 2) throw Error("ssm.cohort", "alignment needs at least 2 shapes, got " + std::to_string(k));

  std::vector<Points> inputs;
  inputs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Points& raw = cohort[i].vertices();
    Points c = centred(raw);
    const double extent = raw.cwiseAbs().maxCoeff();
    if (c.norm() <= 1e-12 * std::max(1.0, extent) * std::sqrt(static_cast<double>(c.rows()))) {
      throw Error("ssm.degenerate_shape", "shape " + std::to_string(i) + " has all vertices coincident");
    }
    inputs.push_back(std::move(c));
  }

  const double reference_size = inputs.front().norm();
  auto fit = [&](const Points& shape, const Points& target) {
    Points out = shape * best_rotation(shape, target).transpose();
    if (options.with_scaling) out *= best_scale(out, target);
    return out;
  };

  Points mean = inputs.front();
  std::vector<Points> aligned(k);
  int iterations = 0;
  double change = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    for (std::size_t i = 0; i < k; ++i) aligned[i] = fit(inputs[i], mean);
    Points next = average(aligned);
    if (options.with_scaling) next *= reference_size / next.norm();
    change = rms_distance(next, mean);
    mean = std::move(next);
    if (change < options.tolerance) break;
    ++iterations;
  }

  // Fix the global frame: carry the converged mean onto the average of the
  // centred inputs. For an already aligned cohort this is the identity.
  const Points plain = average(inputs);
  if (plain.norm() > 1e-12 * reference_size) {
    const Eigen::Matrix3d gauge = best_rotation(mean, plain);
    double scale = 1.0;
    if (options.with_scaling) scale = best_scale(mean * gauge.transpose(), plain);
    for (Points& s : aligned) s = scale * (s * gauge.transpose());
  }

  std::vector<TriangleMesh> meshes;
  meshes.reserve(k);
  for (std::size_t i = 0; i < k; ++i) meshes.push_back(cohort[i].with_vertices(std::move(aligned[i])));
  return Alignment{validate_cohort(std::move(meshes)), iterations, change};
}

TriangleMesh SsmModel::mean_mesh() const { return to_mesh(mean); }

TriangleMesh SsmModel::to_mesh(const ShapeVector& shape) const { return TriangleMesh(unflatten(shape), faces); }

SsmModel build_ssm(const Cohort& aligned, const Retention& retention) {
  const auto k = static_cast<Eigen::Index>(aligned.size());
  if (k < 2) throw Error("ssm.cohort", "model needs at least 2 shapes, got " + std::to_string(k));
  if (retention.variance_fraction &&
      !(*retention.variance_fraction > 0.0 && *retention.variance_fraction <= 1.0)) {
    throw Error("ssm.retention", "variance fraction must lie in (0, 1]", ErrorKind::usage);
  }
  const auto dim = static_cast<Eigen::Index>(aligned.vertex_count() * 3);

  Eigen::MatrixXd data(k, dim);
  for (Eigen::Index i = 0; i < k; ++i) data.row(i) = flatten(aligned[static_cast<std::size_t>(i)].vertices()).transpose();

  SsmModel model;
  model.mean = data.colwise().sum().transpose() / static_cast<double>(k);
  model.faces = aligned.faces();
  model.cohort_size = static_cast<int>(k);
  model.retention = retention;

  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  const double zero_tol = retention.relative_tolerance * data.norm();
  Eigen::Index modes = 0;
  while (modes < std::min<Eigen::Index>(k - 1, sv.size()) && sv(modes) > zero_tol) ++modes;

  Eigen::VectorXd variances = sv.head(modes).array().square() / static_cast<double>(k - 1);
  if (retention.variance_fraction && modes > 0) {
    const double total = variances.sum();
    double running = 0.0;
    Eigen::Index keep = 0;
    while (keep < modes) {
      running += variances(keep++);
      if (running >= *retention.variance_fraction * total) break;
    }
    modes = keep;
  }

  model.eigenvalues = variances.head(modes);
  model.components = svd.matrixV().leftCols(modes);
  for (Eigen::Index j = 0; j < modes; ++j) {
    Eigen::Index arg = 0;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, j) < 0.0) model.components.col(j) *= -1.0;
  }
  return model;
}

ShapeVector generate_shape(const SsmModel& model, const ShapeParams& params) {
  if (params.size() != static_cast<Eigen::Index>(model.mode_count())) {
    throw Error("ssm.dimension", "parameter vector has " + std::to_string(params.size()) +
                                     " entries, model has " + std::to_string(model.mode_count()) + " modes");
  }
  if (!params.allFinite()) throw Error("ssm.dimension", "parameter vector has non-finite entries");
  const Eigen::VectorXd weights = model.eigenvalues.array().sqrt() * params.array();
  return model.mean + model.components * weights;
}

ShapeParams project(const SsmModel& model, const ShapeVector& shape) {
  if (shape.size() != model.mean.size()) {
    throw Error("ssm.dimension", "shape vector has " + std::to_string(shape.size()) + " entries, model expects " +
                                     std::to_string(model.mean.size()));
  }
  Eigen::VectorXd coeffs = model.components.transpose() * (shape - model.mean);
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    const double sd = std::sqrt(model.eigenvalues(j));
    coeffs(j) = sd > 0.0 ? coeffs(j) / sd : 0.0;
  }
  return coeffs;
}

ShapeParams sample_params(const SsmModel& model, double lo, double hi, Rng& rng) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw Error("ssm.range", "sampling range needs lo < hi, got [" + format_double(lo) + ", " + format_double(hi) + "]",
                ErrorKind::usage);
  }
  ShapeParams params(static_cast<Eigen::Index>(model.mode_count()));
  for (Eigen::Index j = 0; j < params.size(); ++j) params(j) = rng.uniform(lo, hi);
  return params;
}

std::string model_to_json(const SsmModel& model) {
  using nlohmann::json;
  json doc;
  doc["format"] = "ssmgen-ssm";
  doc["version"] = kModelFormatVersion;
  doc["N"] = model.vertex_count();
  doc["M"] = model.mode_count();
  doc["K"] = model.cohort_size;
  doc["with_scaling"] = model.with_scaling;
  doc["retention"] = {
      {"variance_fraction", model.retention.variance_fraction ? json(*model.retention.variance_fraction) : json()},
      {"relative_tolerance", model.retention.relative_tolerance}};
  doc["layout"] = "components are stored column-major (mode by mode); faces as flat index triples";
  doc["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  doc["eigenvalues"] =
      std::vector<double>(model.eigenvalues.data(), model.eigenvalues.data() + model.eigenvalues.size());
  doc["components"] =
      std::vector<double>(model.components.data(), model.components.data() + model.components.size());
  std::vector<std::int32_t> faces;
  faces.reserve(model.faces.size() * 3);
  for (const Face& f : model.faces) faces.insert(faces.end(), f.begin(), f.end());
  doc["faces"] = faces;
  return doc.dump() + "\n";
}

SsmModel model_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "ssmgen-ssm") {
      throw Error("ssm.model_file", "not an ssmgen shape model");
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw Error("ssm.model_file", "unsupported model version " + doc.at("version").dump());
    }
    SsmModel model;
    const auto n = doc.at("N").get<Eigen::Index>();
    const auto m = doc.at("M").get<Eigen::Index>();
    model.cohort_size = doc.at("K").get<int>();
    model.with_scaling = doc.at("with_scaling").get<bool>();
    const auto& ret = doc.at("retention");
    if (!ret.at("variance_fraction").is_null()) model.retention.variance_fraction = ret.at("variance_fraction").get<double>();
    model.retention.relative_tolerance = ret.at("relative_tolerance").get<double>();

    const auto mean = doc.at("mean").get<std::vector<double>>();
    const auto eig = doc.at("eigenvalues").get<std::vector<double>>();
    const auto comp = doc.at("components").get<std::vector<double>>();
    const auto faces = doc.at("faces").get<std::vector<std::int32_t>>();
    if (static_cast<Eigen::Index>(mean.size()) != 3 * n || static_cast<Eigen::Index>(eig.size()) != m ||
        static_cast<Eigen::Index>(comp.size()) != 3 * n * m || faces.size() % 3 != 0) {
      throw Error("ssm.model_file", "array sizes do not match the header");
    }
    model.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), 3 * n);
    model.eigenvalues = Eigen::Map<const Eigen::VectorXd>(eig.data(), m);
    model.components = Eigen::Map<const Eigen::MatrixXd>(comp.data(), 3 * n, m);
    for (std::size_t i = 0; i < faces.size(); i += 3) model.faces.push_back({faces[i], faces[i + 1], faces[i + 2]});
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error("ssm.model_file", std::string("malformed model file: ") + e.what());
  }
}

void save_model(const SsmModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

SsmModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace ssmgen::ssm
