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

#include "ssmgen/annotate_server.hpp"
#include "ssmgen/fixture.hpp"
#include "ssmgen/mesh_io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <thread>

using namespace ssmgen;
using nlohmann::json;

namespace {

struct Running {
  AnnotateServer server;
  int port;
  std::thread thread;

  Running(TriangleMesh mesh, LabelMap labels, ServeOptions o)
      : server(std::move(mesh), std::move(labels), [&] { o.port = 0; return o; }()), port(server.bind()) {
    thread = std::thread([this] { server.run(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
};

}  // namespace

TEST_SUITE("annotate_server") {

TEST_CASE("endpoints") {
  testing::TempDir dir("serve");
  const auto fx = fixture::make_fixture(2, 100, 1);
  const TriangleMesh& mesh = fx.meshes[0];
  const std::size_t n = mesh.vertex_count();
  ServeOptions opt;
  opt.labels_path = dir.path() / "labels.csv";
  Running r(mesh, fx.mean_labels, opt);
  httplib::Client cli("127.0.0.1", r.port);

  auto res = cli.Get("/api/mesh");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto m = json::parse(res->body);
  CHECK(m["vertices"].size() == n);
  CHECK(m["faces"].size() == mesh.faces().size());
  CHECK(m["vertices"][5][1].get<double>() == mesh.vertices()(5, 1));

  res = cli.Get("/api/classes");
  REQUIRE(res);
  CHECK(class_table_from_json(res->body) == ClassTable::landmarks());

  res = cli.Get("/api/labels");
  REQUIRE(res);
  CHECK(json::parse(res->body)["labels"].get<std::vector<ClassId>>() == fx.mean_labels.labels());

  // Replace via JSON, read back, and check the file on disk.
  std::vector<ClassId> painted(n, 0);
  for (std::size_t i = 10; i < 20; ++i) painted[i] = 2;
  res = cli.Post("/api/labels", json{{"labels", painted}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = cli.Get("/api/labels");
  CHECK(json::parse(res->body)["labels"].get<std::vector<ClassId>>() == painted);
  CHECK(load_labels(opt.labels_path, ClassTable::landmarks(), n).labels() == painted);
  CHECK(r.server.labels().labels() == painted);

  // Replace via CSV.
  res = cli.Post("/api/labels", "vertex_index,class_id\n3,1\n", "text/csv");
  REQUIRE(res);
  CHECK(res->status == 200);
  std::vector<ClassId> expected(n, 0);
  expected[3] = 1;
  CHECK(r.server.labels().labels() == expected);

  // Invalid bodies leave the map alone.
  res = cli.Post("/api/labels", json{{"labels", std::vector<int>(n - 1, 0)}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["error"]["code"] == "labels.length");
  res = cli.Post("/api/labels", json{{"labels", std::vector<int>(n, 7)}}.dump(), "application/json");
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["error"]["code"] == "labels.unknown_class");
  res = cli.Post("/api/labels", "not json", "application/json");
  CHECK(res->status == 400);
  CHECK(r.server.labels().labels() == expected);
}

TEST_CASE("static UI files") {
  testing::TempDir dir("ui");
  {
    std::ofstream(dir.path() / "index.html") << "<html>ui</html>";
  }
  const auto fx = fixture::make_fixture(2, 100, 1);
  ServeOptions opt;
  opt.ui_dir = dir.path();
  Running r(fx.meshes[0], fx.mean_labels, opt);
  httplib::Client cli("127.0.0.1", r.port);
  auto res = cli.Get("/index.html");
  REQUIRE(res);
  CHECK(res->body == "<html>ui</html>");
  res = cli.Get("/");
  REQUIRE(res);
  CHECK(res->body == "<html>ui</html>");
}

TEST_CASE("construction errors") {
  const auto fx = fixture::make_fixture(2, 100, 1);
  ServeOptions opt;
  opt.host = "0.0.0.0";
  CHECK_ERROR_CODE(AnnotateServer(fx.meshes[0], fx.mean_labels, opt), "annotate.host");
  CHECK_ERROR_CODE(AnnotateServer(fx.meshes[0], LabelMap({0, 1}, ClassTable::landmarks()), ServeOptions{}),
                   "labels.length");
  ServeOptions missing;
  missing.ui_dir = "/nonexistent/ui";
  CHECK_ERROR_CODE(AnnotateServer(fx.meshes[0], fx.mean_labels, missing), "annotate.ui_dir");
}

}  // TEST_SUITE
