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

#include "ssmgen/config.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"

#include <json.hpp>

#include <set>

namespace ssmgen {

using nlohmann::json;

segmenter::TrainOptions TrainSettings::options() const {
  segmenter::TrainOptions o;
  o.lr = lr;
  o.batch_size = batch_size;
  o.epochs = epochs;
  o.seed = seed;
  o.hidden = hidden;
  o.class_weight_cap = class_weight_cap;
  o.features = features;
  o.workers = workers;
  return o;
}

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("config.parse", message, ErrorKind::usage); }

// Reads the members of one JSON object, rejecting any it was not asked about.
class Section {
 public:
  Section(const json& parent, const std::string& name) : name_(name) {
    if (!parent.contains(name)) return;
    obj_ = &parent.at(name);
    if (!obj_->is_object()) fail("'" + name + "' must be an object");
  }
  void finish() const {
    if (!obj_) return;
    for (const auto& item : obj_->items()) {
      if (!seen_.count(item.key())) fail("unknown key '" + name_ + "." + item.key() + "'");
    }
  }

  template <typename T>
  void read(const std::string& key, T& field) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    try {
      field = obj_->at(key).get<T>();
    } catch (const json::exception&) {
      fail("bad value for '" + name_ + "." + key + "'");
    }
  }

  void read_optional(const std::string& key, std::optional<double>& field) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    const json& v = obj_->at(key);
    if (v.is_null()) {
      field.reset();
    } else if (v.is_number()) {
      field = v.get<double>();
    } else {
      fail("bad value for '" + name_ + "." + key + "'");
    }
  }

  template <typename E>
  void read_enum(const std::string& key, E& field, E (*parse)(const std::string&)) {
    std::string text;
    read(key, text);
    if (text.empty()) return;
    try {
      field = parse(text);
    } catch (const Error&) {
      fail("bad value for '" + name_ + "." + key + "': " + text);
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

datagen::DownsampleMode parse_downsample(const std::string& s) {
  if (s == "fps") return datagen::DownsampleMode::fps;
  if (s == "random") return datagen::DownsampleMode::random;
  throw Error("config.parse", "unknown downsample mode " + s, ErrorKind::usage);
}

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
  const auto& d = c.dataset.config;
  json doc = {
      {"fixture", {{"n_shapes", c.fixture.n_shapes}, {"n_vertices", c.fixture.n_vertices}, {"seed", c.fixture.seed}}},
      {"ssm",
       {{"with_scaling", c.ssm.with_scaling},
        {"gpa_tolerance", c.ssm.gpa_tolerance},
        {"gpa_max_iterations", c.ssm.gpa_max_iterations},
        {"variance_fraction", c.ssm.variance_fraction ? json(*c.ssm.variance_fraction) : json(nullptr)}}},
      {"dataset",
       {{"n_train", d.n_train},
        {"n_val", d.n_val},
        {"n_test", d.n_test},
        {"n_points", d.n_points},
        {"sigma_lo", d.sigma_lo},
        {"sigma_hi", d.sigma_hi},
        {"rotate_train", d.rotate_train},
        {"rotate_val", d.rotate_val},
        {"rotate_test", d.rotate_test},
        {"downsample", d.downsample == datagen::DownsampleMode::fps ? "fps" : "random"},
        {"fps_start", d.fps_start},
        {"seed", c.dataset.seed},
        {"workers", c.dataset.workers}}},
      {"train",
       {{"lr", c.train.lr},
        {"batch_size", c.train.batch_size},
        {"epochs", c.train.epochs},
        {"seed", c.train.seed},
        {"hidden", c.train.hidden},
        {"class_weight_cap", c.train.class_weight_cap},
        {"k_local", c.train.features.k_local},
        {"scales", c.train.features.scales},
        {"workers", c.train.workers}}},
      {"eval", {{"include_background", c.eval.include_background}, {"split", datagen::split_name(c.eval.split)}}},
      {"paths",
       {{"cohort_dir", c.paths.cohort_dir},
        {"mean_labels", c.paths.mean_labels},
        {"classes", c.paths.classes},
        {"ssm_model", c.paths.ssm_model},
        {"dataset_dir", c.paths.dataset_dir},
        {"segmenter_model", c.paths.segmenter_model},
        {"predictions_dir", c.paths.predictions_dir},
        {"report", c.paths.report}}}};
  return doc.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config must be a JSON object");
  static const std::set<std::string> sections{"fixture", "ssm", "dataset", "train", "eval", "paths"};
  for (const auto& item : doc.items()) {
    if (!sections.count(item.key())) fail("unknown section '" + item.key() + "'");
  }

  PipelineConfig c;
  {
    Section s(doc, "fixture");
    s.read("n_shapes", c.fixture.n_shapes);
    s.read("n_vertices", c.fixture.n_vertices);
    s.read("seed", c.fixture.seed);
    s.finish();
  }
  {
    Section s(doc, "ssm");
    s.read("with_scaling", c.ssm.with_scaling);
    s.read("gpa_tolerance", c.ssm.gpa_tolerance);
    s.read("gpa_max_iterations", c.ssm.gpa_max_iterations);
    s.read_optional("variance_fraction", c.ssm.variance_fraction);
    s.finish();
  }
  {
    auto& d = c.dataset.config;
    Section s(doc, "dataset");
    s.read("n_train", d.n_train);
    s.read("n_val", d.n_val);
    s.read("n_test", d.n_test);
    s.read("n_points", d.n_points);
    s.read("sigma_lo", d.sigma_lo);
    s.read("sigma_hi", d.sigma_hi);
    s.read("rotate_train", d.rotate_train);
    s.read("rotate_val", d.rotate_val);
    s.read("rotate_test", d.rotate_test);
    s.read_enum("downsample", d.downsample, &parse_downsample);
    s.read("fps_start", d.fps_start);
    s.read("seed", c.dataset.seed);
    s.read("workers", c.dataset.workers);
    s.finish();
  }
  {
    Section s(doc, "train");
    s.read("lr", c.train.lr);
    s.read("batch_size", c.train.batch_size);
    s.read("epochs", c.train.epochs);
    s.read("seed", c.train.seed);
    s.read("hidden", c.train.hidden);
    s.read("class_weight_cap", c.train.class_weight_cap);
    s.read("k_local", c.train.features.k_local);
    s.read("scales", c.train.features.scales);
    s.read("workers", c.train.workers);
    s.finish();
  }
  {
    Section s(doc, "eval");
    s.read("include_background", c.eval.include_background);
    s.read_enum("split", c.eval.split, &datagen::parse_split);
    s.finish();
  }
  {
    Section s(doc, "paths");
    s.read("cohort_dir", c.paths.cohort_dir);
    s.read("mean_labels", c.paths.mean_labels);
    s.read("classes", c.paths.classes);
    s.read("ssm_model", c.paths.ssm_model);
    s.read("dataset_dir", c.paths.dataset_dir);
    s.read("segmenter_model", c.paths.segmenter_model);
    s.read("predictions_dir", c.paths.predictions_dir);
    s.read("report", c.paths.report);
    s.finish();
  }
  if (!(c.dataset.config.sigma_lo < c.dataset.config.sigma_hi)) fail("dataset.sigma_lo must be below dataset.sigma_hi");
  if (c.train.batch_size == 0) fail("train.batch_size must be positive");
  if (!(c.train.lr > 0.0)) fail("train.lr must be positive");
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() != "config.parse") throw;
    throw Error(e.code(), path.string() + ": " + e.what(), e.kind());
  }
}

void save_config(const PipelineConfig& config, const std::filesystem::path& path) {
  write_text_file(path, config_to_json(config));
}

}  // namespace ssmgen
