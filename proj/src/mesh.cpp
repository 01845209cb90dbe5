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

#include "ssmgen/mesh.hpp"

#include "ssmgen/error.hpp"

#include <string>

namespace ssmgen {

Points unflatten(const Eigen::VectorXd& shape) {
  if (shape.size() % 3 != 0) {
    throw Error("mesh.dimension",
                "shape vector length " + std::to_string(shape.size()) + " is not divisible by 3");
  }
  return Eigen::Map<const Points>(shape.data(), shape.size() / 3, 3);
}

TriangleMesh::TriangleMesh(Points vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto n = vertices_.rows();
  if (n < 3) {
    throw Error("mesh.invalid", "mesh needs at least 3 vertices, got " + std::to_string(n));
  }
  if (!vertices_.allFinite()) {
    throw Error("mesh.invalid", "mesh has non-finite vertex coordinates");
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = faces_[f];
    for (auto idx : face) {
      if (idx < 0 || idx >= n) {
        throw Error("mesh.index_range", "face " + std::to_string(f) + " references vertex " +
                                            std::to_string(idx) + " but the mesh has " +
                                            std::to_string(n) + " vertices");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw Error("mesh.invalid", "face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

TriangleMesh TriangleMesh::with_vertices(Points vertices) const {
  if (vertices.rows() != vertices_.rows()) {
    throw Error("mesh.dimension", "replacement vertex block has " + std::to_string(vertices.rows()) +
                                      " rows, mesh has " + std::to_string(vertices_.rows()));
  }
  return TriangleMesh(std::move(vertices), faces_);
}

PointCloud::PointCloud(Points points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw Error("mesh.invalid", "point cloud is empty");
  if (!points_.allFinite()) throw Error("mesh.invalid", "point cloud has non-finite coordinates");
}

Cohort validate_cohort(std::vector<TriangleMesh> meshes) {
  if (meshes.empty()) throw Error("mesh.correspondence", "cohort is empty");
  const TriangleMesh& ref = meshes.front();
  for (std::size_t i = 1; i < meshes.size(); ++i) {
    const TriangleMesh& m = meshes[i];
    if (m.vertex_count() != ref.vertex_count()) {
      throw Error("mesh.correspondence",
                  "meshes (0," + std::to_string(i) + ") differ in vertex count: " +
                      std::to_string(ref.vertex_count()) + " vs " + std::to_string(m.vertex_count()));
    }
    if (m.faces() != ref.faces()) {
      throw Error("mesh.correspondence",
                  "meshes (0," + std::to_string(i) + ") differ in topology (face lists not identical)");
    }
  }
  return Cohort(std::move(meshes));
}

}  // namespace ssmgen
