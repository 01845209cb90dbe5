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

#include "ssmgen/labels.hpp"
#include "ssmgen/mesh.hpp"
#include "ssmgen/random.hpp"
#include "ssmgen/ssm.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ssmgen::datagen {

// ---------------------------------------------------------------------------
// Point sampling and neighbourhoods

/// Greedy max-min (farthest point) sampling. The first pick is `start_index`;
/// each further pick maximizes the minimum Euclidean distance to the points
/// already picked, ties going to the lowest index. Throws "datagen.count"
/// unless 1 <= m <= N.
std::vector<std::size_t> fps(const PointCloud& cloud, std::size_t m, std::size_t start_index = 0);

/// The k nearest points to `query`, ascending by distance, ties by index.
std::vector<std::size_t> knn_indices(const PointCloud& cloud, const Eigen::Vector3d& query, std::size_t k);

/// k nearest neighbours of every point (the point itself included), row-major
/// N x k. Same ordering rule as knn_indices, so a point comes first in its own
/// row unless a coincident point has a lower index.
std::vector<std::size_t> knn_table(const PointCloud& cloud, std::size_t k);

// ---------------------------------------------------------------------------
// Rotations and shuffling

using Rotation = Eigen::Matrix3d;

/// Uniform rotation over SO(3) from a normalized 4D Gaussian quaternion.
Rotation random_rotation(Rng& rng);

struct LabeledCloud {
  PointCloud cloud;
  LabelMap labels;
  std::uint64_t shape_id = 0;
};

/// Rows of the result are input rows `permutation[j]`.
LabeledCloud permute(const LabeledCloud& input, const std::vector<std::size_t>& permutation);

struct Shuffled {
  LabeledCloud cloud;
  std::vector<std::size_t> permutation;
};

/// Applies one random permutation jointly to points and labels.
Shuffled shuffle_points(const LabeledCloud& input, Rng& rng);

LabeledCloud rotate(const LabeledCloud& input, const Rotation& rotation);

// ---------------------------------------------------------------------------
// Dataset generation

enum class Split { train, val, test };
std::string split_name(Split split);
Split parse_split(const std::string& name);

enum class DownsampleMode { fps, random };

struct DatasetConfig {
  std::size_t n_train = 8800;
  std::size_t n_val = 2200;
  std::size_t n_test = 500;
  std::size_t n_points = 4096;
  double sigma_lo = ssm::kDefaultSigmaLo;
  double sigma_hi = ssm::kDefaultSigmaHi;
  bool rotate_train = false;
  bool rotate_val = false;
  bool rotate_test = true;
  DownsampleMode downsample = DownsampleMode::fps;
  std::size_t fps_start = 0;

  std::size_t total() const { return n_train + n_val + n_test; }
  Split split_of(std::size_t shape_id) const;
  bool rotates(Split split) const;

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

struct ShapeRecord {
  std::uint64_t id = 0;
  Split split = Split::train;
  ssm::ShapeParams params;
  std::vector<std::size_t> downsample_indices;  ///< vertex indices of the generated shape
  std::vector<std::size_t> permutation;         ///< output row j = downsampled row permutation[j]
  Rotation rotation = Rotation::Identity();
  std::string file;                             ///< relative to the dataset directory
};

struct DatasetManifest {
  std::uint64_t master_seed = 0;
  DatasetConfig config;
  std::size_t model_vertices = 0;
  std::size_t model_modes = 0;
  bool complete = false;
  std::vector<ShapeRecord> records;

  std::vector<const ShapeRecord*> split(Split s) const;
};

inline constexpr int kManifestVersion = 1;

/// Runs the full per-shape pipeline for shape `id`: draw parameters, generate
/// the shape, transfer the mean labels, downsample, shuffle and (if the
/// split asks for it) rotate. Pure function of its arguments.
std::pair<ShapeRecord, LabeledCloud> make_shape(const ssm::SsmModel& model, const LabelMap& mean_labels,
                                               const DatasetConfig& config, std::uint64_t master_seed,
                                               std::uint64_t id);

/// Generates every shape with `workers` threads and writes
///   <out>/manifest.json, <out>/classes.json, <out>/{train,val,test}/shape_<id>.xyzl
/// Output bytes do not depend on `workers`. On failure, the shape files
/// written so far are removed and the error is rethrown.
DatasetManifest generate_dataset(const ssm::SsmModel& model, const LabelMap& mean_labels,
                                 const DatasetConfig& config, std::uint64_t master_seed,
                                 const std::filesystem::path& out_dir, unsigned workers = 1);

std::string shape_file_name(std::uint64_t id);

// ---------------------------------------------------------------------------
// File formats

/// Rows `x y z class_id`, space-separated, coordinates with 9 significant digits.
std::string to_xyzl(const LabeledCloud& cloud);
LabeledCloud parse_xyzl(const std::string& text, const ClassTable& table, std::uint64_t shape_id = 0);
void save_xyzl(const LabeledCloud& cloud, const std::filesystem::path& path);
LabeledCloud load_xyzl(const std::filesystem::path& path, const ClassTable& table, std::uint64_t shape_id = 0);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
DatasetManifest load_manifest(const std::filesystem::path& dataset_dir);

/// Loads every cloud of one split, in manifest order.
std::vector<LabeledCloud> load_split(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest,
                                     Split split, const ClassTable& table);

}  // namespace ssmgen::datagen
