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

#include "ssmgen/mesh.hpp"
#include "ssmgen/random.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ssmgen::ssm {

/// Flat 3N coordinate vector (x1,y1,z1,...,xN,yN,zN) in millimeters.
using ShapeVector = Eigen::VectorXd;

/// Per-mode coefficients in standard-deviation units.
using ShapeParams = Eigen::VectorXd;

/// Default sampling range for shape parameters, in standard deviations.
inline constexpr double kDefaultSigmaLo = -2.75;
inline constexpr double kDefaultSigmaHi = 1.75;

struct GpaOptions {
  bool with_scaling = false;
  double tolerance = 1e-9;  ///< stop when the mean moves less than this (RMS per vertex, mm)
  int max_iterations = 100;
};

struct Alignment {
  Cohort cohort;
  int iterations = 0;         ///< iterations that changed the mean by >= tolerance
  double final_change = 0.0;  ///< RMS mean change of the last iteration
};

/// Generalized Procrustes alignment.
///
/// Every shape is centred and rotated (optionally scaled) onto an iteratively
/// re-estimated mean. The rotation for each shape is the closed-form orthogonal
/// Procrustes solution with the determinant forced to +1. The overall frame is
/// then fixed by rotating the converged mean onto the plain average of the
/// centred inputs, which makes alignment idempotent: an aligned cohort is a
/// fixed point.
///
/// Throws ssmgen::Error("ssm.degenerate_shape") for a shape whose vertices all
/// coincide, and "ssm.cohort" for fewer than two shapes.
Alignment gpa_align(const Cohort& cohort, const GpaOptions& options = {});

/// Rotation R (det +1) minimizing sum_i |R * source_i - target_i|^2 for
/// centred point sets.
Eigen::Matrix3d best_rotation(const Points& source, const Points& target);

/// Root mean squared per-vertex distance between two equally sized point sets.
double rms_distance(const Points& a, const Points& b);

/// How many modes a model keeps.
struct Retention {
  /// Keep the smallest leading set of modes whose variance reaches this
  /// fraction of the total. Unset keeps every nontrivial mode (M = K - 1 for a
  /// cohort of full rank).
  std::optional<double> variance_fraction;
  /// Singular values at or below `relative_tolerance * |data|_F` count as zero.
  double relative_tolerance = 1e-10;
};

struct SsmModel {
  ShapeVector mean;              ///< x̄
  Eigen::VectorXd eigenvalues;   ///< Λ, descending, mm²
  Eigen::MatrixXd components;    ///< V, 3N x M, orthonormal columns
  std::vector<Face> faces;       ///< topology shared with the cohort
  int cohort_size = 0;           ///< K
  bool with_scaling = false;
  Retention retention;

  std::size_t vertex_count() const { return static_cast<std::size_t>(mean.size() / 3); }
  std::size_t mode_count() const { return static_cast<std::size_t>(eigenvalues.size()); }

  TriangleMesh mean_mesh() const;
  TriangleMesh to_mesh(const ShapeVector& shape) const;
};

/// PCA of the aligned cohort via a thin SVD of the centred K x 3N data matrix.
/// Eigenvalues are squared singular values divided by K - 1. Each component is
/// sign-normalized so its largest-magnitude entry is positive.
SsmModel build_ssm(const Cohort& aligned, const Retention& retention = {});

/// x = x̄ + V diag(sqrt(Λ)) a.
ShapeVector generate_shape(const SsmModel& model, const ShapeParams& params);

/// Coefficients (in standard deviations) of the orthogonal projection of
/// `shape` onto the model subspace. Modes with zero variance get coefficient 0.
ShapeParams project(const SsmModel& model, const ShapeVector& shape);

/// Each entry independently uniform on [lo, hi). Throws "ssm.range" unless lo < hi.
ShapeParams sample_params(const SsmModel& model, double lo, double hi, Rng& rng);

/// Model file: a single JSON document with a header and flat arrays. Numbers
/// are written in shortest round-trip form, so reload is bit-exact.
inline constexpr int kModelFormatVersion = 1;
std::string model_to_json(const SsmModel& model);
SsmModel model_from_json(const std::string& text);
void save_model(const SsmModel& model, const std::filesystem::path& path);
SsmModel load_model(const std::filesystem::path& path);

}  // namespace ssmgen::ssm
