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

#include "ssmgen/eval.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"

#include <json.hpp>

#include <cstdio>

namespace ssmgen::eval {

std::optional<double> iou(const LabelMap& ground_truth, const LabelMap& prediction, ClassId class_id) {
  if (ground_truth.size() != prediction.size()) {
    throw Error("eval.length", "ground truth has " + std::to_string(ground_truth.size()) + " labels, prediction has " +
                                   std::to_string(prediction.size()));
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    const bool g = ground_truth[i] == class_id;
    const bool p = prediction[i] == class_id;
    inter += (g && p) ? 1 : 0;
    uni += (g || p) ? 1 : 0;
  }
  if (uni == 0) return std::nullopt;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::map<ClassId, double> class_ious(const LabelMap& ground_truth, const LabelMap& prediction,
                                     const ClassPolicy& policy) {
  std::map<ClassId, double> out;
  for (ClassId c : ground_truth.class_table().ids()) {
    if (c == kBackground && !policy.include_background) continue;
    if (auto v = iou(ground_truth, prediction, c)) out[c] = *v;
  }
  return out;
}

double miou_shape(const LabelMap& ground_truth, const LabelMap& prediction, const ClassPolicy& policy) {
  const auto per_class = class_ious(ground_truth, prediction, policy);
  if (per_class.empty()) {
    throw Error("eval.undefined_metric", "no includable class is present in ground truth or prediction");
  }
  double sum = 0.0;
  for (const auto& kv : per_class) sum += kv.second;
  return sum / static_cast<double>(per_class.size());
}

EvalReport evaluate(const std::vector<ShapePair>& pairs, const ClassPolicy& policy) {
  if (pairs.empty()) throw Error("eval.empty", "nothing to evaluate");
  EvalReport report;
  report.policy = policy;
  report.classes = pairs.front().ground_truth.class_table();

  std::map<ClassId, std::pair<double, std::size_t>> sums;
  double miou_sum = 0.0;
  for (const ShapePair& pair : pairs) {
    ShapeResult r;
    r.shape_id = pair.shape_id;
    r.class_iou = class_ious(pair.ground_truth, pair.prediction, policy);
    r.miou = miou_shape(pair.ground_truth, pair.prediction, policy);
    for (const auto& [c, v] : r.class_iou) {
      sums[c].first += v;
      ++sums[c].second;
    }
    miou_sum += r.miou;
    report.shapes.push_back(std::move(r));
  }
  for (const auto& [c, s] : sums) report.class_mean_iou[c] = s.first / static_cast<double>(s.second);
  report.mean_miou = miou_sum / static_cast<double>(pairs.size());
  return report;
}

EvalReport evaluate_dataset(const std::filesystem::path& dataset_dir, const datagen::DatasetManifest& manifest,
                            const std::filesystem::path& prediction_dir, const ClassTable& classes,
                            const ClassPolicy& policy, datagen::Split split) {
  const auto records = manifest.split(split);
  if (records.empty()) {
    throw Error("eval.empty", "dataset has no shapes in split '" + datagen::split_name(split) + "'");
  }
  std::vector<std::string> missing;
  for (const auto* r : records) {
    if (!std::filesystem::exists(prediction_dir / datagen::shape_file_name(r->id))) missing.push_back(std::to_string(r->id));
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ",") + id;
    throw Error("eval.missing_prediction", "missing predictions for shape ids: " + list);
  }

  std::vector<ShapePair> pairs;
  for (const auto* r : records) {
    auto gt = datagen::load_xyzl(dataset_dir / r->file, classes, r->id);
    auto pred = datagen::load_xyzl(prediction_dir / datagen::shape_file_name(r->id), classes, r->id);
    if (gt.cloud.size() != pred.cloud.size()) {
      throw Error("eval.length", "shape " + std::to_string(r->id) + ": prediction has " +
                                     std::to_string(pred.cloud.size()) + " points, ground truth " +
                                     std::to_string(gt.cloud.size()));
    }
    pairs.push_back({std::to_string(r->id), std::move(gt.labels), std::move(pred.labels)});
  }
  return evaluate(pairs, policy);
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::json;
  auto class_map = [&](const std::map<ClassId, double>& m) {
    json out = json::object();
    for (const auto& [c, v] : m) out[std::to_string(c)] = v;
    return out;
  };
  json shapes = json::array();
  for (const auto& s : report.shapes) {
    shapes.push_back({{"shape_id", s.shape_id}, {"class_iou", class_map(s.class_iou)}, {"miou", s.miou}});
  }
  json names = json::object();
  for (const auto& [c, info] : report.classes.classes()) names[std::to_string(c)] = info.name;
  json doc = {{"config",
               {{"include_background", report.policy.include_background},
                {"empty_class_policy", "classes absent from both ground truth and prediction are skipped"},
                {"class_names", names}}},
              {"dataset", {{"mean_miou", report.mean_miou}, {"class_mean_iou", class_map(report.class_mean_iou)}}},
              {"shapes", shapes}};
  return doc.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "shapes evaluated: %zu   background in mIoU: %s\n", report.shapes.size(),
                report.policy.include_background ? "yes" : "no");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-28s %8s\n", "metric", "value");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-28s %7.2f%%\n", "mIoU (mean over shapes)", 100.0 * report.mean_miou);
  out += buf;
  for (const auto& [c, v] : report.class_mean_iou) {
    const std::string name = report.classes.contains(c) ? report.classes.at(c).name : std::to_string(c);
    std::snprintf(buf, sizeof(buf), "%-28s %7.2f%%\n", ("IoU " + name).c_str(), 100.0 * v);
    out += buf;
  }
  return out;
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "shape_id,miou";
  const auto ids = report.classes.ids();
  for (ClassId c : ids) out += ",iou_" + std::to_string(c);
  out += '\n';
  for (const auto& s : report.shapes) {
    out += s.shape_id + ',' + format_double(s.miou);
    for (ClassId c : ids) {
      out += ',';
      if (auto it = s.class_iou.find(c); it != s.class_iou.end()) out += format_double(it->second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ssmgen::eval
