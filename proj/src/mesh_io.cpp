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

#include "ssmgen/mesh_io.hpp"

#include "ssmgen/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ssmgen {

namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what,
                              const std::string& code = "mesh.parse") {
  throw Error(code, "line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

double parse_double(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    parse_error(line_no, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

long long parse_integer(std::string_view token, std::size_t line_no) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    parse_error(line_no, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

// Iterates over lines keeping a 1-based line counter.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

Points to_points(const std::vector<double>& coords) {
  Points points(static_cast<Eigen::Index>(coords.size() / 3), 3);
  std::copy(coords.begin(), coords.end(), points.data());
  return points;
}

void check_face_range(const std::vector<Face>& faces, const std::vector<std::size_t>& face_lines,
                      std::size_t vertex_count) {
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (auto idx : faces[f]) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= vertex_count) {
        parse_error(face_lines[f],
                    "face index " + std::to_string(idx + 1) + " out of range (" +
                        std::to_string(vertex_count) + " vertices)",
                    "mesh.index_range");
      }
    }
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io.read", "cannot open '" + path.string() + "' for reading", ErrorKind::data);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.empty()) throw Error("io.write", "empty output path", ErrorKind::internal);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io.write", "cannot open '" + path.string() + "' for writing", ErrorKind::internal);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("io.write", "failed writing '" + path.string() + "'", ErrorKind::internal);
}

MeshFormat parse_mesh_format(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (!lower.empty() && lower.front() == '.') lower.erase(0, 1);
  if (lower == "obj") return MeshFormat::obj;
  if (lower == "ply") return MeshFormat::ply;
  throw Error("mesh.format", "unsupported mesh format '" + std::string(name) + "' (expected obj or ply)",
              ErrorKind::usage);
}

MeshFormat format_from_path(const std::filesystem::path& path) {
  return parse_mesh_format(path.extension().string());
}

TriangleMesh parse_obj(std::string_view text) {
  std::vector<double> coords;
  std::vector<Face> faces;
  std::vector<std::size_t> face_lines;
  LineReader reader(text);
  std::string_view line;

  while (reader.next(line)) {
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string_view kw = tokens[0];
    const std::size_t ln = reader.line_no();

    if (kw == "v") {
      if (tokens.size() < 4 || tokens.size() > 5) parse_error(ln, "vertex needs 3 coordinates");
      for (int k = 1; k <= 3; ++k) coords.push_back(parse_double(tokens[k], ln));
    } else if (kw == "f") {
      if (tokens.size() != 4) {
        parse_error(ln, "only triangular faces are supported (got " + std::to_string(tokens.size() - 1) +
                            " vertices)",
                    "mesh.unsupported_element");
      }
      Face face{};
      const auto vertex_count = static_cast<long long>(coords.size() / 3);
      for (int k = 0; k < 3; ++k) {
        std::string_view ref = tokens[k + 1];
        ref = ref.substr(0, ref.find('/'));
        long long idx = parse_integer(ref, ln);
        if (idx == 0) parse_error(ln, "face index 0 is invalid in OBJ (indices are 1-based)", "mesh.index_range");
        // Negative indices count back from the most recent vertex.
        idx = idx > 0 ? idx - 1 : vertex_count + idx;
        face[k] = static_cast<std::int32_t>(idx);
      }
      faces.push_back(face);
      face_lines.push_back(ln);
    } else if (kw == "vn" || kw == "vt" || kw == "vp" || kw == "o" || kw == "g" || kw == "s" ||
               kw == "usemtl" || kw == "mtllib") {
      continue;
    } else {
      parse_error(ln, "unsupported OBJ element '" + std::string(kw) + "'", "mesh.unsupported_element");
    }
  }
  check_face_range(faces, face_lines, coords.size() / 3);
  return TriangleMesh(to_points(coords), std::move(faces));
}

TriangleMesh parse_ply(std::string_view text) {
  LineReader reader(text);
  std::string_view line;

  if (!reader.next(line) || split_ws(line) != std::vector<std::string_view>{"ply"}) {
    parse_error(1, "missing 'ply' magic line");
  }

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
    bool face_list = false;
  };
  std::vector<Element> elements;
  bool format_seen = false;

  for (;;) {
    if (!reader.next(line)) parse_error(reader.line_no(), "unexpected end of header");
    const auto tokens = split_ws(line);
    const std::size_t ln = reader.line_no();
    if (tokens.empty()) continue;
    if (tokens[0] == "end_header") break;
    if (tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2) parse_error(ln, "malformed format line");
      if (tokens[1] != "ascii") {
        parse_error(ln, "binary PLY ('" + std::string(tokens[1]) + "') is not supported; convert to ASCII",
                    "mesh.unsupported_format");
      }
      format_seen = true;
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) parse_error(ln, "malformed element line");
      Element el;
      el.name = std::string(tokens[1]);
      const long long count = parse_integer(tokens[2], ln);
      if (count < 0) parse_error(ln, "negative element count");
      el.count = static_cast<std::size_t>(count);
      if (el.name != "vertex" && el.name != "face") {
        parse_error(ln, "unsupported PLY element '" + el.name + "'", "mesh.unsupported_element");
      }
      elements.push_back(std::move(el));
    } else if (tokens[0] == "property") {
      if (elements.empty()) parse_error(ln, "property before any element");
      Element& el = elements.back();
      if (tokens.size() >= 2 && tokens[1] == "list") {
        if (el.name != "face" || tokens.size() != 5 ||
            (tokens[4] != "vertex_indices" && tokens[4] != "vertex_index")) {
          parse_error(ln, "unsupported list property", "mesh.unsupported_element");
        }
        el.face_list = true;
        el.properties.emplace_back(tokens[4]);
      } else {
        if (tokens.size() != 3) parse_error(ln, "malformed property line");
        el.properties.emplace_back(tokens[2]);
      }
    } else {
      parse_error(ln, "unexpected header line '" + std::string(tokens[0]) + "'");
    }
  }
  if (!format_seen) parse_error(reader.line_no(), "header has no format line");

  std::vector<double> coords;
  std::vector<Face> faces;
  std::vector<std::size_t> face_lines;

  for (const Element& el : elements) {
    if (el.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (std::size_t p = 0; p < el.properties.size(); ++p) {
        if (el.properties[p] == "x") ix = static_cast<int>(p);
        if (el.properties[p] == "y") iy = static_cast<int>(p);
        if (el.properties[p] == "z") iz = static_cast<int>(p);
      }
      if (ix < 0 || iy < 0 || iz < 0) parse_error(reader.line_no(), "vertex element lacks x/y/z properties");
      for (std::size_t v = 0; v < el.count; ++v) {
        if (!reader.next(line)) parse_error(reader.line_no(), "unexpected end of vertex data");
        const auto tokens = split_ws(line);
        if (tokens.size() != el.properties.size()) {
          parse_error(reader.line_no(), "expected " + std::to_string(el.properties.size()) + " vertex values");
        }
        coords.push_back(parse_double(tokens[ix], reader.line_no()));
        coords.push_back(parse_double(tokens[iy], reader.line_no()));
        coords.push_back(parse_double(tokens[iz], reader.line_no()));
      }
    } else {
      if (!el.face_list || el.properties.size() != 1) {
        parse_error(reader.line_no(), "face element must have exactly one vertex_indices list",
                    "mesh.unsupported_element");
      }
      for (std::size_t f = 0; f < el.count; ++f) {
        if (!reader.next(line)) parse_error(reader.line_no(), "unexpected end of face data");
        const auto tokens = split_ws(line);
        const std::size_t ln = reader.line_no();
        if (tokens.empty()) parse_error(ln, "empty face line");
        const long long n = parse_integer(tokens[0], ln);
        if (n != 3) {
          parse_error(ln, "only triangular faces are supported (got " + std::to_string(n) + ")",
                      "mesh.unsupported_element");
        }
        if (tokens.size() != 4) parse_error(ln, "face line has wrong number of indices");
        Face face{};
        for (int k = 0; k < 3; ++k) face[k] = static_cast<std::int32_t>(parse_integer(tokens[k + 1], ln));
        faces.push_back(face);
        face_lines.push_back(ln);
      }
    }
  }
  while (reader.next(line)) {
    if (!split_ws(line).empty()) parse_error(reader.line_no(), "trailing data after declared elements");
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (auto idx : faces[f]) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= coords.size() / 3) {
        parse_error(face_lines[f],
                    "face index " + std::to_string(idx) + " out of range (" +
                        std::to_string(coords.size() / 3) + " vertices)",
                    "mesh.index_range");
      }
    }
  }
  return TriangleMesh(to_points(coords), std::move(faces));
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string text = read_text_file(path);
  try {
    return format == MeshFormat::obj ? parse_obj(text) : parse_ply(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.kind());
  }
}

TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_path(path)); }

std::string to_obj(const TriangleMesh& mesh) {
  std::string out;
  const Points& v = mesh.vertices();
  out.reserve(static_cast<std::size_t>(v.rows()) * 64 + mesh.faces().size() * 24);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out += "v ";
    out += format_double(v(i, 0));
    out += ' ';
    out += format_double(v(i, 1));
    out += ' ';
    out += format_double(v(i, 2));
    out += '\n';
  }
  for (const Face& f : mesh.faces()) {
    out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
  }
  return out;
}

std::string to_ply(const TriangleMesh& mesh) {
  const Points& v = mesh.vertices();
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(v.rows()) +
                    "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
                    std::to_string(mesh.faces().size()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out += format_double(v(i, 0)) + ' ' + format_double(v(i, 1)) + ' ' + format_double(v(i, 2)) + '\n';
  }
  for (const Face& f : mesh.faces()) {
    out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
  }
  return out;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  write_text_file(path, format == MeshFormat::obj ? to_obj(mesh) : to_ply(mesh));
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  save_mesh(mesh, path, format_from_path(path));
}

}  // namespace ssmgen
