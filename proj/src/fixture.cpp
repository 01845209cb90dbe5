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

#include "ssmgen/fixture.hpp"

#include "ssmgen/datagen.hpp"
#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"
#include "ssmgen/random.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace ssmgen::fixture {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Landmark layout on the sphere grid.
constexpr double kBandHalfWidth = 9.0 * kDeg;       // ridge band: |lat| <= this
constexpr double kStripLongitude = 0.5 * kPi;        // ligament meridian
constexpr double kStripHalfWidth = 0.16;             // |dlon| * cos(lat) <= this (radians of arc)
constexpr double kStripLatLo = 15.0 * kDeg;
constexpr double kStripLatHi = 80.0 * kDeg;

// Geometry of the landmarks.
constexpr double kRidgeWidth = 0.12;
constexpr double kGrooveWidth = 0.15;

struct ShapeParams {
  double a, b, c;
  double ridge_height, groove_depth;
  std::array<double, 8> field;
};

double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0) x += 2.0 * kPi;
  return x - kPi;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::Vector3d surface_point(double lat, double lon, const ShapeParams& s) {
  const Eigen::Vector3d u(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
  const std::array<double, 8> basis{u.x(),       u.y(),       u.z(),
                                    u.x() * u.y(), u.y() * u.z(), u.x() * u.z(),
                                    u.x() * u.x() - u.y() * u.y(), 3.0 * u.z() * u.z() - 1.0};
  double f = 1.0;
  for (std::size_t k = 0; k < basis.size(); ++k) f += s.field[k] * basis[k];
  f += s.ridge_height * std::exp(-std::pow(lat / kRidgeWidth, 2));
  const double across = wrap_angle(lon - kStripLongitude) * std::cos(lat);
  const double window = sigmoid((lat - kStripLatLo) / 0.05) * sigmoid((kStripLatHi - lat) / 0.05);
  f -= s.groove_depth * std::exp(-std::pow(across / kGrooveWidth, 2)) * window;
  return f * Eigen::Vector3d(s.a * u.x(), s.b * u.y(), s.c * u.z());
}

}  // namespace

SphereGrid SphereGrid::for_vertex_count(std::size_t min_vertices) {
  SphereGrid g;
  const double body = static_cast<double>(min_vertices > 2 ? min_vertices - 2 : 1);
  g.rings = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(std::sqrt(body / 2.0))));
  g.segments = std::max<std::size_t>(6, static_cast<std::size_t>(std::ceil(body / static_cast<double>(g.rings))));
  return g;
}

double SphereGrid::latitude(std::size_t vertex) const {
  if (vertex == 0) return 0.5 * kPi;
  if (vertex == vertex_count() - 1) return -0.5 * kPi;
  const std::size_t ring = (vertex - 1) / segments;
  return 0.5 * kPi - kPi * static_cast<double>(ring + 1) / static_cast<double>(rings + 1);
}

double SphereGrid::longitude(std::size_t vertex) const {
  if (vertex == 0 || vertex == vertex_count() - 1) return 0.0;
  const std::size_t seg = (vertex - 1) % segments;
  return 2.0 * kPi * static_cast<double>(seg) / static_cast<double>(segments);
}

std::vector<Face> SphereGrid::faces() const {
  std::vector<Face> faces;
  auto at = [&](std::size_t ring, std::size_t seg) {
    return static_cast<std::int32_t>(1 + ring * segments + seg % segments);
  };
  const auto south = static_cast<std::int32_t>(vertex_count() - 1);
  for (std::size_t s = 0; s < segments; ++s) faces.push_back({0, at(0, s + 1), at(0, s)});
  for (std::size_t r = 0; r + 1 < rings; ++r) {
    for (std::size_t s = 0; s < segments; ++s) {
      faces.push_back({at(r, s), at(r, s + 1), at(r + 1, s)});
      faces.push_back({at(r, s + 1), at(r + 1, s + 1), at(r + 1, s)});
    }
  }
  for (std::size_t s = 0; s < segments; ++s) faces.push_back({south, at(rings - 1, s), at(rings - 1, s + 1)});
  return faces;
}

Fixture make_fixture(std::size_t n_shapes, std::size_t n_vertices, std::uint64_t seed) {
  if (n_shapes < 2) throw Error("fixture.count", "fixture needs at least 2 shapes", ErrorKind::usage);
  if (n_vertices < 100) throw Error("fixture.count", "fixture needs at least 100 vertices", ErrorKind::usage);

  const SphereGrid grid = SphereGrid::for_vertex_count(n_vertices);
  const std::size_t n = grid.vertex_count();
  const auto faces = grid.faces();

  std::vector<ClassId> labels(n, kBackground);
  for (std::size_t v = 0; v < n; ++v) {
    const double lat = grid.latitude(v);
    const double lon = grid.longitude(v);
    if (std::abs(lat) <= kBandHalfWidth) {
      labels[v] = 1;
    } else if (lat >= kStripLatLo && lat <= kStripLatHi &&
               std::abs(wrap_angle(lon - kStripLongitude)) * std::cos(lat) <= kStripHalfWidth) {
      labels[v] = 2;
    }
  }

  std::vector<TriangleMesh> meshes;
  for (std::size_t i = 0; i < n_shapes; ++i) {
    Rng rng = Rng::stream(seed, i);
    ShapeParams s{};
    s.a = 70.0 * (1.0 + 0.06 * rng.normal());
    s.b = 55.0 * (1.0 + 0.06 * rng.normal());
    s.c = 40.0 * (1.0 + 0.06 * rng.normal());
    s.ridge_height = 0.07 * std::max(0.3, 1.0 + 0.2 * rng.normal());
    s.groove_depth = 0.08 * std::max(0.3, 1.0 + 0.2 * rng.normal());
    for (double& f : s.field) f = 0.03 * rng.normal();

    const datagen::Rotation rot = datagen::random_rotation(rng);
    const Eigen::Vector3d shift(20.0 * rng.normal(), 20.0 * rng.normal(), 20.0 * rng.normal());

    Points pts(static_cast<Eigen::Index>(n), 3);
    for (std::size_t v = 0; v < n; ++v) {
      const Eigen::Vector3d p = rot * surface_point(grid.latitude(v), grid.longitude(v), s) + shift;
      pts.row(static_cast<Eigen::Index>(v)) = p.transpose();
    }
    meshes.emplace_back(std::move(pts), faces);
  }
  return {grid, std::move(meshes), LabelMap(std::move(labels), ClassTable::landmarks())};
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "meshes", ec);
  if (ec) throw Error("io.write", "cannot create '" + (out_dir / "meshes").string() + "'", ErrorKind::internal);
  for (std::size_t i = 0; i < fixture.meshes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "shape_%03zu.obj", i);
    save_mesh(fixture.meshes[i], out_dir / "meshes" / name, MeshFormat::obj);
  }
  save_labels(fixture.mean_labels, out_dir / "mean_labels.csv");
  save_class_table(fixture.mean_labels.class_table(), out_dir / "classes.json");
}

}  // namespace ssmgen::fixture
