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

#include "ssmgen/annotate_server.hpp"

#include "ssmgen/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <mutex>

namespace ssmgen {

using nlohmann::json;

namespace {

bool is_loopback(const std::string& host) {
  return host == "127.0.0.1" || host == "localhost" || host == "::1";
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump() + "\n", "application/json");
}

}  // namespace

struct AnnotateServer::Impl {
  TriangleMesh mesh;
  LabelMap labels;
  ServeOptions options;
  std::string mesh_json;
  httplib::Server server;
  mutable std::mutex mutex;
  int port = -1;

  Impl(TriangleMesh m, LabelMap l, ServeOptions o)
      : mesh(std::move(m)), labels(std::move(l)), options(std::move(o)) {}

  LabelMap parse_body(const httplib::Request& req) const {
    const ClassTable& table = labels.class_table();
    const std::size_t n = static_cast<std::size_t>(mesh.vertex_count());
    const std::string type = req.get_header_value("Content-Type");
    if (type.rfind("text/csv", 0) == 0) return parse_labels_csv(req.body, table, n);

    json doc;
    try {
      doc = json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw Error("annotate.body", std::string("malformed JSON body: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("labels") || !doc.at("labels").is_array()) {
      throw Error("annotate.body", "body must be {\"labels\": [...]}");
    }
    std::vector<ClassId> values;
    for (const auto& v : doc.at("labels")) {
      if (!v.is_number_integer()) throw Error("annotate.body", "labels must be integers");
      values.push_back(v.get<ClassId>());
    }
    if (values.size() != n) {
      throw Error("labels.length",
                  "got " + std::to_string(values.size()) + " labels for a mesh of " + std::to_string(n) + " vertices");
    }
    return LabelMap(std::move(values), table);
  }

  void install_routes() {
    server.Get("/api/mesh", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(mesh_json, "application/json");
    });
    server.Get("/api/classes", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(class_table_to_json(labels.class_table()), "application/json");
    });
    server.Get("/api/labels", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mutex);
      res.set_content(json{{"labels", labels.labels()}}.dump() + "\n", "application/json");
    });
    server.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        LabelMap next = parse_body(req);
        std::lock_guard lock(mutex);
        if (!options.labels_path.empty()) save_labels(next, options.labels_path);
        labels = std::move(next);
        json hist = json::object();
        for (const auto& [c, count] : labels.histogram()) hist[std::to_string(c)] = count;
        res.set_content(json{{"ok", true}, {"vertex_count", labels.size()}, {"histogram", hist}}.dump() + "\n",
                        "application/json");
      } catch (const Error& e) {
        reply_error(res, e.kind() == ErrorKind::internal ? 500 : 400, e.code(), e.what());
      }
    });
    if (options.ui_dir.empty()) {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ssmgen annotate-serve: no UI directory configured; API under /api\n", "text/plain");
      });
    } else if (!server.set_mount_point("/", options.ui_dir.string())) {
      throw Error("annotate.ui_dir", "UI directory '" + options.ui_dir.string() + "' does not exist",
                  ErrorKind::usage);
    }
  }
};

AnnotateServer::AnnotateServer(TriangleMesh mesh, LabelMap labels, ServeOptions options) {
  if (!is_loopback(options.host)) {
    throw Error("annotate.host", "refusing to serve on non-loopback host '" + options.host + "'", ErrorKind::usage);
  }
  if (labels.size() != static_cast<std::size_t>(mesh.vertex_count())) {
    throw Error("labels.length", "label map has " + std::to_string(labels.size()) + " entries, mesh has " +
                                     std::to_string(mesh.vertex_count()) + " vertices");
  }
  impl_ = std::make_unique<Impl>(std::move(mesh), std::move(labels), std::move(options));

  json vertices = json::array();
  const Points& v = impl_->mesh.vertices();
  for (Eigen::Index i = 0; i < v.rows(); ++i) vertices.push_back({v(i, 0), v(i, 1), v(i, 2)});
  json faces = json::array();
  for (const Face& f : impl_->mesh.faces()) faces.push_back({f[0], f[1], f[2]});
  impl_->mesh_json = json{{"vertices", vertices}, {"faces", faces}}.dump() + "\n";
  impl_->install_routes();
}

AnnotateServer::~AnnotateServer() {
  if (impl_) impl_->server.stop();
}

int AnnotateServer::bind() {
  if (impl_->port >= 0) return impl_->port;
  const auto& o = impl_->options;
  const int port = o.port == 0 ? impl_->server.bind_to_any_port(o.host)
                               : (impl_->server.bind_to_port(o.host, o.port) ? o.port : -1);
  if (port < 0) {
    throw Error("annotate.bind", "cannot bind " + o.host + ":" + std::to_string(o.port), ErrorKind::internal);
  }
  impl_->port = port;
  return port;
}

void AnnotateServer::run() {
  bind();
  impl_->server.listen_after_bind();
}

void AnnotateServer::stop() { impl_->server.stop(); }

void AnnotateServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

LabelMap AnnotateServer::labels() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->labels;
}

}  // namespace ssmgen
