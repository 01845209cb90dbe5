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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssmgen {

using ClassId = int;
inline constexpr ClassId kBackground = 0;

struct ClassInfo {
  std::string name;
  std::string color;  // "#RRGGBB"

  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

/// Class id -> display info. Id 0 is always present as background.
class ClassTable {
 public:
  ClassTable();
  explicit ClassTable(std::map<ClassId, ClassInfo> classes);

  /// The two liver landmarks used throughout the tooling.
  static ClassTable landmarks();

  bool contains(ClassId id) const { return classes_.count(id) != 0; }
  const ClassInfo& at(ClassId id) const;
  const std::map<ClassId, ClassInfo>& classes() const noexcept { return classes_; }
  std::vector<ClassId> ids() const;
  std::size_t size() const noexcept { return classes_.size(); }

  /// True when ids are exactly 0..size()-1.
  bool is_contiguous() const;

  friend bool operator==(const ClassTable&, const ClassTable&) = default;

 private:
  std::map<ClassId, ClassInfo> classes_;
};

/// One class id per vertex or point.
class LabelMap {
 public:
  LabelMap(std::vector<ClassId> labels, ClassTable table);

  const std::vector<ClassId>& labels() const noexcept { return labels_; }
  const ClassTable& class_table() const noexcept { return table_; }
  std::size_t size() const noexcept { return labels_.size(); }
  ClassId operator[](std::size_t i) const { return labels_[i]; }

  /// Vertex count per class id in the class table (zero entries included).
  std::map<ClassId, std::size_t> histogram() const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::vector<ClassId> labels_;
  ClassTable table_;
};

/// Class table JSON: {"classes":[{"id":1,"name":"...","color":"#0000FF"}, ...]}.
ClassTable load_class_table(const std::filesystem::path& path);
void save_class_table(const ClassTable& table, const std::filesystem::path& path);
std::string class_table_to_json(const ClassTable& table);
ClassTable class_table_from_json(const std::string& text);

/// Label CSV with header `vertex_index,class_id`. Vertices absent from the
/// file are background. With `vertex_count` the result has exactly that length
/// and indices beyond it are rejected; without it the length is max index + 1.
LabelMap parse_labels_csv(const std::string& text, const ClassTable& table,
                          std::optional<std::size_t> vertex_count = std::nullopt);
LabelMap load_labels(const std::filesystem::path& path, const ClassTable& table,
                     std::optional<std::size_t> vertex_count = std::nullopt);

/// Writes one row per vertex, background included, so the length round-trips.
std::string labels_to_csv(const LabelMap& labels);
void save_labels(const LabelMap& labels, const std::filesystem::path& path);

}  // namespace ssmgen
