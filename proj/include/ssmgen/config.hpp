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

#include "ssmgen/datagen.hpp"
#include "ssmgen/segmenter.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace ssmgen {

struct FixtureSettings {
  std::size_t n_shapes = 10;
  std::size_t n_vertices = 2000;
  std::uint64_t seed = 7;
  friend bool operator==(const FixtureSettings&, const FixtureSettings&) = default;
};

struct SsmSettings {
  bool with_scaling = false;
  double gpa_tolerance = 1e-9;
  int gpa_max_iterations = 100;
  std::optional<double> variance_fraction;  // unset keeps every nonzero mode
  friend bool operator==(const SsmSettings&, const SsmSettings&) = default;
};

struct DatasetSettings {
  datagen::DatasetConfig config;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  friend bool operator==(const DatasetSettings&, const DatasetSettings&) = default;
};

struct TrainSettings {
  double lr = 1e-3;
  std::size_t batch_size = 12;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden{64, 64};
  double class_weight_cap = 20.0;
  segmenter::FeatureConfig features;
  unsigned workers = 1;
  friend bool operator==(const TrainSettings&, const TrainSettings&) = default;

  segmenter::TrainOptions options() const;
};

struct EvalSettings {
  bool include_background = true;
  datagen::Split split = datagen::Split::test;
  friend bool operator==(const EvalSettings&, const EvalSettings&) = default;
};

struct PathSettings {
  std::string cohort_dir = "fixture/meshes";
  std::string mean_labels = "fixture/mean_labels.csv";
  std::string classes = "fixture/classes.json";
  std::string ssm_model = "out/ssm.json";
  std::string dataset_dir = "out/dataset";
  std::string segmenter_model = "out/segmenter.json";
  std::string predictions_dir = "out/predictions";
  std::string report = "out/report.json";
  friend bool operator==(const PathSettings&, const PathSettings&) = default;
};

/// Every pipeline knob in one place. The file form is a JSON object with one
/// member per section; missing members keep their defaults, unknown members
/// are rejected.
struct PipelineConfig {
  FixtureSettings fixture;
  SsmSettings ssm;
  DatasetSettings dataset;
  TrainSettings train;
  EvalSettings eval;
  PathSettings paths;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

std::string config_to_json(const PipelineConfig& config);
/// Throws "config.parse" (usage) on malformed JSON, unknown keys or bad values.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& config, const std::filesystem::path& path);

}  // namespace ssmgen
