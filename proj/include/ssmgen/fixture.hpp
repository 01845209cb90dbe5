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

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ssmgen::fixture {

/// UV-sphere layout: north pole, `rings` rings of `segments` vertices, south pole.
struct SphereGrid {
  std::size_t rings = 0;
  std::size_t segments = 0;

  /// Smallest near-square grid with at least `min_vertices` vertices.
  static SphereGrid for_vertex_count(std::size_t min_vertices);
  std::size_t vertex_count() const { return rings * segments + 2; }
  double latitude(std::size_t vertex) const;   ///< radians, +pi/2 at the north pole
  double longitude(std::size_t vertex) const;  ///< radians in [0, 2pi)
  std::vector<Face> faces() const;
};

/// A synthetic corresponded cohort standing in for a clinical one.
///
/// Each shape is an ellipsoid with a raised ridge along the equator and a
/// groove along a meridian on the upper half, deformed by a random smooth
/// radial field and placed with a random rigid motion. Labels live on the
/// shared topology: class 1 is the equatorial band (ridge), class 2 the
/// meridian strip (ligament).
struct Fixture {
  SphereGrid grid;
  std::vector<TriangleMesh> meshes;
  LabelMap mean_labels;
};

/// Throws "fixture.count" unless n_shapes >= 2 and n_vertices >= 100.
Fixture make_fixture(std::size_t n_shapes, std::size_t n_vertices, std::uint64_t seed);

/// Writes meshes/shape_XXX.obj, mean_labels.csv and classes.json under `out_dir`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& out_dir);

}  // namespace ssmgen::fixture
