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

#include <filesystem>
#include <memory>
#include <string>

namespace ssmgen {

struct ServeOptions {
  std::string host = "127.0.0.1";  ///< loopback addresses only
  int port = 8080;                 ///< 0 picks a free port
  std::filesystem::path ui_dir;    ///< served at "/" when set
  std::filesystem::path labels_path;  ///< POSTed maps are written here when set
};

/// Backend of the annotation tool.
///
///   GET  /api/mesh     {"vertices": [[x,y,z],...], "faces": [[i,j,k],...]}
///   GET  /api/classes  {"classes": [{"id","name","color"},...]}
///   GET  /api/labels   {"labels": [c0, c1, ...]}
///   POST /api/labels   JSON {"labels": [...]} or a vertex_index,class_id CSV
///                      (Content-Type text/csv); replaces the working map
///
/// Errors answer with {"error": {"code", "message"}} and status 400 or 500.
/// Requests are serialized: there is one working map and one user.
class AnnotateServer {
 public:
  /// Throws "annotate.host" (usage) for a non-loopback host and
  /// "labels.length" when `labels` does not cover the mesh.
  AnnotateServer(TriangleMesh mesh, LabelMap labels, ServeOptions options);
  ~AnnotateServer();
  AnnotateServer(const AnnotateServer&) = delete;
  AnnotateServer& operator=(const AnnotateServer&) = delete;

  /// Binds the socket and returns the port. Throws "annotate.bind" on failure.
  int bind();
  /// Serves until stop(). bind() is called first if needed.
  void run();
  void stop();
  void wait_until_ready() const;

  LabelMap labels() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ssmgen
