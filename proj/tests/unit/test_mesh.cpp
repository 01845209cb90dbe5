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

#include "helpers.hpp"

#include "ssmgen/labels.hpp"
#include "ssmgen/mesh_io.hpp"

#include <cmath>

using namespace ssmgen;

namespace {

TriangleMesh tetra() {
  Points p(4, 3);
  p << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  return TriangleMesh(p, {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}});
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("mesh validation") {
  Points p(3, 3);
  p << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  CHECK_NOTHROW(TriangleMesh(p, {{0, 1, 2}}));
  CHECK_ERROR_CODE(TriangleMesh(p, {{0, 1, 3}}), "mesh.index_range");
  CHECK_ERROR_CODE(TriangleMesh(p, {{0, -1, 2}}), "mesh.index_range");
  CHECK_ERROR_CODE(TriangleMesh(p, {{0, 1, 1}}), "mesh.invalid");
  Points bad = p;
  bad(1, 2) = std::nan("");
  CHECK_ERROR_CODE(TriangleMesh(bad, {{0, 1, 2}}), "mesh.invalid");
  CHECK_ERROR_CODE(PointCloud(Points(0, 3)), "mesh.invalid");
}

TEST_CASE("flatten and unflatten are inverse") {
  Rng rng(3);
  const Points p = testing::random_points(17, rng);
  const Eigen::VectorXd x = flatten(p);
  CHECK(x.size() == 51);
  CHECK(x(3) == p(1, 0));
  CHECK(x(5) == p(1, 2));
  CHECK(unflatten(x) == p);
  CHECK_ERROR_CODE(unflatten(Eigen::VectorXd::Zero(7)), "mesh.dimension");
}

TEST_CASE("cohort correspondence") {
  const TriangleMesh a = tetra();
  CHECK_NOTHROW(validate_cohort({a, a, a}));
  Points p(5, 3);
  p.setRandom();
  const TriangleMesh other(p, {{0, 1, 2}});
  try {
    validate_cohort({a, a, other});
    FAIL("expected mesh.correspondence");
  } catch (const Error& e) {
    CHECK(e.code() == "mesh.correspondence");
    CHECK(std::string(e.what()).find("(0,2)") != std::string::npos);
  }
  auto faces = a.faces();
  std::swap(faces[0], faces[1]);
  CHECK_ERROR_CODE(validate_cohort({a, TriangleMesh(a.vertices(), faces)}), "mesh.correspondence");
}

TEST_CASE("OBJ round trip is bit exact") {
  Rng rng(11);
  Points p = testing::random_points(4, rng);
  p(0, 0) = 0.1;
  p(1, 1) = 1e-300;
  p(2, 2) = -123456.789012345678;
  const TriangleMesh m(p, tetra().faces());
  const TriangleMesh back = parse_obj(to_obj(m));
  CHECK(back == m);
  CHECK(parse_ply(to_ply(m)) == m);
}

TEST_CASE("OBJ parsing") {
  const std::string text =
      "# comment\nmtllib x.mtl\no thing\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nvt 0 0\nv 0 1 0\n"
      "s off\nf 1/1/1 2/2/1 3/3/1\nf -3 -2 -1\n";
  const TriangleMesh m = parse_obj(text);
  CHECK(m.vertex_count() == 3);
  REQUIRE(m.faces().size() == 2);
  CHECK(m.faces()[1] == Face{0, 1, 2});
  CHECK_ERROR_CODE(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), "mesh.unsupported_element");
  CHECK_ERROR_CODE(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n"), "mesh.index_range");
  CHECK_ERROR_CODE(parse_obj("v 0 0 0\ncurv 1 2\n"), "mesh.unsupported_element");
  try {
    parse_obj("v 0 0 0\nv 1 x 0\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("PLY parsing") {
  const std::string ascii =
      "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
      "property float nx\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n"
      "0 0 0 9\n1 0 0 9\n0 1 0 9\n3 0 1 2\n";
  const TriangleMesh m = parse_ply(ascii);
  CHECK(m.vertex_count() == 3);
  CHECK(m.vertices()(1, 0) == 1.0);
  CHECK_ERROR_CODE(parse_ply("ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n"),
                   "mesh.unsupported_format");
  CHECK(format_from_path("a/b.PLY") == MeshFormat::ply);
  CHECK(format_from_path("b.obj") == MeshFormat::obj);
}

TEST_CASE("mesh files") {
  testing::TempDir dir("mesh");
  const TriangleMesh m = tetra();
  save_mesh(m, dir.path() / "t.obj");
  save_mesh(m, dir.path() / "t.ply");
  CHECK(load_mesh(dir.path() / "t.obj") == m);
  CHECK(load_mesh(dir.path() / "t.ply") == m);
  CHECK_ERROR_CODE(load_mesh(dir.path() / "missing.obj"), "io.read");
}

}  // TEST_SUITE

TEST_SUITE("labels") {

TEST_CASE("class table") {
  const ClassTable t = ClassTable::landmarks();
  CHECK(t.size() == 3);
  CHECK(t.at(0).name == "background");
  CHECK(t.at(1).name == "anterior_ridge");
  CHECK(t.at(2).name == "falciform_ligament");
  CHECK(t.is_contiguous());
  CHECK_ERROR_CODE(t.at(7), "labels.unknown_class");
  CHECK(class_table_from_json(class_table_to_json(t)) == t);
}

TEST_CASE("label CSV") {
  const ClassTable t = ClassTable::landmarks();
  CHECK(parse_labels_csv("vertex_index,class_id\n0,1\n1,0\n2,2\n", t).labels() == std::vector<ClassId>{1, 0, 2});
  const LabelMap m = parse_labels_csv("vertex_index,class_id\n1,2\n3,1\n", t, 5);
  CHECK(m.labels() == std::vector<ClassId>{0, 2, 0, 1, 0});
  CHECK(parse_labels_csv(labels_to_csv(m), t, 5) == m);
  CHECK(parse_labels_csv(labels_to_csv(m), t) == m);
  CHECK_ERROR_CODE(parse_labels_csv("vertex_index,class_id\n1,2\n1,1\n", t, 5), "labels.duplicate_index");
  CHECK_ERROR_CODE(parse_labels_csv("vertex_index,class_id\n1,9\n", t, 5), "labels.unknown_class");
  CHECK_ERROR_CODE(parse_labels_csv("vertex_index,class_id\n7,1\n", t, 5), "labels.length");
  CHECK_ERROR_CODE(parse_labels_csv("index,label\n1,1\n", t, 5), "labels.parse");
  CHECK_ERROR_CODE(LabelMap({0, 5}, t), "labels.unknown_class");
  const auto h = m.histogram();
  CHECK(h.at(0) == 3);
  CHECK(h.at(1) == 1);
  CHECK(h.at(2) == 1);
}

TEST_CASE("minimal OBJ and count preservation") {
  const TriangleMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  CHECK(m.vertex_count() == 3);
  CHECK(m.faces().size() == 1);
  Points p(4096, 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) = Eigen::RowVector3d(i, i % 7, i % 11);
  const std::string text = to_obj(TriangleMesh(p, {{0, 1, 2}}));
  std::size_t v_lines = 0;
  for (std::size_t pos = 0; (pos = text.find("\nv ", pos)) != std::string::npos; ++pos) ++v_lines;
  if (text.rfind("v ", 0) == 0) ++v_lines;
  CHECK(v_lines == 4096);
  CHECK_ERROR_CODE(save_mesh(m, "", MeshFormat::obj), "io.write");
}

TEST_CASE("unit cube round trip") {
  Points p(8, 3);
  for (int i = 0; i < 8; ++i) p.row(i) = Eigen::RowVector3d(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const std::vector<Face> faces{{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                                {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  const TriangleMesh cube(p, faces);
  testing::TempDir dir("cube");
  save_mesh(cube, dir.path() / "cube.obj");
  const TriangleMesh once = load_mesh(dir.path() / "cube.obj");
  save_mesh(once, dir.path() / "again.obj");
  CHECK(once == cube);
  CHECK(load_mesh(dir.path() / "again.obj") == cube);
}

TEST_CASE("cohort vertex count mismatch names the pair") {
  Rng rng(4);
  const TriangleMesh a(testing::random_points(100, rng), {{0, 1, 2}});
  const TriangleMesh b(testing::random_points(101, rng), {{0, 1, 2}});
  try {
    validate_cohort({a, b});
    FAIL("expected mesh.correspondence");
  } catch (const Error& e) {
    CHECK(e.code() == "mesh.correspondence");
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }
}

}  // TEST_SUITE
