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
#include "ssmgen/labels.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssmgen::eval {

/// |GT=c ∩ Pred=c| / |GT=c ∪ Pred=c|, or nothing when the class is absent from
/// both (such a class is skipped in every average, never scored 0 or 1).
std::optional<double> iou(const LabelMap& ground_truth, const LabelMap& prediction, ClassId class_id);

struct ClassPolicy {
  bool include_background = true;
};

/// Per-class IoU for every class of the ground-truth table that the policy
/// admits and that is present in GT or Pred.
std::map<ClassId, double> class_ious(const LabelMap& ground_truth, const LabelMap& prediction,
                                     const ClassPolicy& policy = {});

/// Mean of class_ious. Throws "eval.undefined_metric" when no class qualifies.
double miou_shape(const LabelMap& ground_truth, const LabelMap& prediction, const ClassPolicy& policy = {});

struct ShapeResult {
  std::string shape_id;
  std::map<ClassId, double> class_iou;
  double miou = 0.0;
};

struct EvalReport {
  ClassPolicy policy;
  ClassTable classes;
  std::vector<ShapeResult> shapes;
  std::map<ClassId, double> class_mean_iou;  ///< mean over shapes where the class was scored
  double mean_miou = 0.0;                    ///< mean of per-shape mIoU
};

struct ShapePair {
  std::string shape_id;
  LabelMap ground_truth;
  LabelMap prediction;
};

EvalReport evaluate(const std::vector<ShapePair>& pairs, const ClassPolicy& policy = {});

/// Scores prediction files `<prediction_dir>/shape_<id>.xyzl` against the
/// ground truth of every shape in `split`. Throws "eval.missing_prediction"
/// listing every shape id without a prediction file.
EvalReport evaluate_dataset(const std::filesystem::path& dataset_dir, const datagen::DatasetManifest& manifest,
                            const std::filesystem::path& prediction_dir, const ClassTable& classes,
                            const ClassPolicy& policy = {}, datagen::Split split = datagen::Split::test);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace ssmgen::eval
