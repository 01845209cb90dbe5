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

#include "ssmgen/labels.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"

#include <json.hpp>

#include <charconv>
#include <sstream>

namespace ssmgen {

namespace {

ClassInfo background_info() { return {"background", "#C0C0C0"}; }

long long parse_int_field(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error("labels.parse", "line " + std::to_string(line_no) + ": expected an integer, got '" +
                                    std::string(field) + "'");
  }
  return value;
}

}  // namespace

ClassTable::ClassTable() : classes_{{kBackground, background_info()}} {}

ClassTable::ClassTable(std::map<ClassId, ClassInfo> classes) : classes_(std::move(classes)) {
  for (const auto& [id, info] : classes_) {
    if (id < 0) throw Error("labels.class_table", "negative class id " + std::to_string(id));
  }
  classes_.try_emplace(kBackground, background_info());
}

ClassTable ClassTable::landmarks() {
  return ClassTable({{1, {"anterior_ridge", "#0000FF"}}, {2, {"falciform_ligament", "#FF0000"}}});
}

const ClassInfo& ClassTable::at(ClassId id) const {
  auto it = classes_.find(id);
  if (it == classes_.end()) {
    throw Error("labels.unknown_class", "class id " + std::to_string(id) + " is not in the class table");
  }
  return it->second;
}

std::vector<ClassId> ClassTable::ids() const {
  std::vector<ClassId> out;
  out.reserve(classes_.size());
  for (const auto& kv : classes_) out.push_back(kv.first);
  return out;
}

bool ClassTable::is_contiguous() const {
  ClassId expected = 0;
  for (const auto& kv : classes_) {
    if (kv.first != expected++) return false;
  }
  return true;
}

LabelMap::LabelMap(std::vector<ClassId> labels, ClassTable table)
    : labels_(std::move(labels)), table_(std::move(table)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!table_.contains(labels_[i])) {
      throw Error("labels.unknown_class", "vertex " + std::to_string(i) + " has class id " +
                                              std::to_string(labels_[i]) +
                                              " which is not in the class table");
    }
  }
}

std::map<ClassId, std::size_t> LabelMap::histogram() const {
  std::map<ClassId, std::size_t> counts;
  for (ClassId id : table_.ids()) counts[id] = 0;
  for (ClassId c : labels_) ++counts[c];
  return counts;
}

std::string class_table_to_json(const ClassTable& table) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [id, info] : table.classes()) {
    classes.push_back({{"id", id}, {"name", info.name}, {"color", info.color}});
  }
  return nlohmann::json{{"classes", classes}}.dump(2) + "\n";
}

ClassTable class_table_from_json(const std::string& text) {
  std::map<ClassId, ClassInfo> classes;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& entry : doc.at("classes")) {
      const ClassId id = entry.at("id").get<ClassId>();
      ClassInfo info{entry.at("name").get<std::string>(), entry.value("color", std::string("#808080"))};
      if (!classes.emplace(id, std::move(info)).second) {
        throw Error("labels.class_table", "duplicate class id " + std::to_string(id));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("labels.class_table", std::string("malformed class table: ") + e.what());
  }
  return ClassTable(std::move(classes));
}

ClassTable load_class_table(const std::filesystem::path& path) {
  return class_table_from_json(read_text_file(path));
}

void save_class_table(const ClassTable& table, const std::filesystem::path& path) {
  write_text_file(path, class_table_to_json(table));
}

LabelMap parse_labels_csv(const std::string& text, const ClassTable& table,
                          std::optional<std::size_t> vertex_count) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<ClassId> labels(vertex_count.value_or(0), kBackground);
  std::vector<bool> seen(labels.size(), false);

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "vertex_index,class_id") {
        throw Error("labels.parse", "line " + std::to_string(line_no) +
                                        ": expected header 'vertex_index,class_id'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error("labels.parse", "line " + std::to_string(line_no) + ": expected two comma-separated fields");
    }
    const long long index = parse_int_field(std::string_view(line).substr(0, comma), line_no);
    const long long cls = parse_int_field(std::string_view(line).substr(comma + 1), line_no);
    if (index < 0) {
      throw Error("labels.parse", "line " + std::to_string(line_no) + ": negative vertex index");
    }
    const auto idx = static_cast<std::size_t>(index);
    if (vertex_count && idx >= *vertex_count) {
      throw Error("labels.length", "line " + std::to_string(line_no) + ": vertex index " +
                                       std::to_string(idx) + " out of range for " +
                                       std::to_string(*vertex_count) + " vertices");
    }
    if (!table.contains(static_cast<ClassId>(cls))) {
      throw Error("labels.unknown_class",
                  "line " + std::to_string(line_no) + ": unknown class id " + std::to_string(cls));
    }
    if (idx >= labels.size()) {
      labels.resize(idx + 1, kBackground);
      seen.resize(idx + 1, false);
    }
    if (seen[idx]) {
      throw Error("labels.duplicate_index",
                  "line " + std::to_string(line_no) + ": vertex index " + std::to_string(idx) + " repeated");
    }
    seen[idx] = true;
    labels[idx] = static_cast<ClassId>(cls);
  }
  if (!header_seen) throw Error("labels.parse", "label file is empty (missing header)");
  return LabelMap(std::move(labels), table);
}

LabelMap load_labels(const std::filesystem::path& path, const ClassTable& table,
                     std::optional<std::size_t> vertex_count) {
  return parse_labels_csv(read_text_file(path), table, vertex_count);
}

std::string labels_to_csv(const LabelMap& labels) {
  std::string out = "vertex_index,class_id\n";
  out.reserve(out.size() + labels.size() * 8);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(labels[i]);
    out += '\n';
  }
  return out;
}

void save_labels(const LabelMap& labels, const std::filesystem::path& path) {
  write_text_file(path, labels_to_csv(labels));
}

}  // namespace ssmgen
