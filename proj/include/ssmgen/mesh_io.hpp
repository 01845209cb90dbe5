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

#include <filesystem>
#include <string>
#include <string_view>

namespace ssmgen {

enum class MeshFormat { obj, ply };

/// Picks the format from the file extension (.obj / .ply, case-insensitive).
MeshFormat format_from_path(const std::filesystem::path& path);
MeshFormat parse_mesh_format(std::string_view name);

// Readers keep vertex order exactly as on disk. Normals, UVs and any extra
// per-vertex properties are parsed and dropped. Errors carry the line number.
TriangleMesh parse_obj(std::string_view text);
TriangleMesh parse_ply(std::string_view text);
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

// Writers print coordinates in shortest round-trip form, so save/load is
// bit-exact.
std::string to_obj(const TriangleMesh& mesh);
std::string to_ply(const TriangleMesh& mesh);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Shared helpers for text output.
std::string format_double(double value);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ssmgen
