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

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ssmgen {

/// N x 3 coordinates in millimeters, one row per vertex. Row-major so that the
/// underlying storage is exactly the flat (x1,y1,z1,...,xN,yN,zN) shape vector.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Face = std::array<std::int32_t, 3>;

/// Flat view of a point block as a 3N shape vector, and back.
inline Eigen::VectorXd flatten(const Points& points) {
  return Eigen::Map<const Eigen::VectorXd>(points.data(), points.size());
}
Points unflatten(const Eigen::VectorXd& shape);

/// Triangle mesh whose vertex order carries correspondence across a cohort.
/// Validated on construction and immutable afterwards.
class TriangleMesh {
 public:
  TriangleMesh(Points vertices, std::vector<Face> faces);

  const Points& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  std::size_t vertex_count() const noexcept { return static_cast<std::size_t>(vertices_.rows()); }

  /// Same topology, new coordinates.
  TriangleMesh with_vertices(Points vertices) const;

  friend bool operator==(const TriangleMesh& a, const TriangleMesh& b) {
    return a.faces_ == b.faces_ && a.vertices_ == b.vertices_;
  }

 private:
  Points vertices_;
  std::vector<Face> faces_;
};

/// Ordered point set {x_i}, i = 1..N. All coordinates finite, N >= 1.
class PointCloud {
 public:
  explicit PointCloud(Points points);

  const Points& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  Eigen::Vector3d point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }

 private:
  Points points_;
};

/// Meshes sharing one vertex count and one face list.
class Cohort {
 public:
  const std::vector<TriangleMesh>& meshes() const noexcept { return meshes_; }
  std::size_t size() const noexcept { return meshes_.size(); }
  std::size_t vertex_count() const noexcept { return meshes_.front().vertex_count(); }
  const std::vector<Face>& faces() const noexcept { return meshes_.front().faces(); }
  const TriangleMesh& operator[](std::size_t i) const { return meshes_[i]; }

 private:
  explicit Cohort(std::vector<TriangleMesh> meshes) : meshes_(std::move(meshes)) {}
  friend Cohort validate_cohort(std::vector<TriangleMesh> meshes);

  std::vector<TriangleMesh> meshes_;
};

/// Accepts the list iff every mesh matches the first in vertex count and face
/// list. Throws ssmgen::Error("mesh.correspondence") naming the first
/// mismatching pair otherwise.
Cohort validate_cohort(std::vector<TriangleMesh> meshes);

}  // namespace ssmgen
