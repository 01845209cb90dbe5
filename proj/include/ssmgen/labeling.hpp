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

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssmgen::labeling {

/// Several annotators' label maps for one shape.
class AnnotationSet {
 public:
  AnnotationSet(std::string shape_id, std::vector<LabelMap> annotations, std::vector<std::string> annotator_ids = {});

  const std::string& shape_id() const noexcept { return shape_id_; }
  const std::vector<LabelMap>& annotations() const noexcept { return annotations_; }
  const std::vector<std::string>& annotator_ids() const noexcept { return annotator_ids_; }

 private:
  std::string shape_id_;
  std::vector<LabelMap> annotations_;
  std::vector<std::string> annotator_ids_;
};

enum class AggregationPolicy {
  /// A vertex takes class c != 0 if any annotator chose c. Competing nonzero
  /// classes resolve by count, ties to the lowest id.
  union_,
  /// A class needs a strict majority of annotators, otherwise background.
  majority,
};

AggregationPolicy parse_policy(const std::string& name);
std::string policy_name(AggregationPolicy policy);

/// Copies the mean-shape labels onto a shape with the same vertex indexing.
LabelMap transfer_labels(const LabelMap& mean_labels, std::size_t vertex_count);
inline LabelMap transfer_labels(const LabelMap& mean_labels, const Eigen::VectorXd& shape) {
  return transfer_labels(mean_labels, static_cast<std::size_t>(shape.size() / 3));
}
inline LabelMap transfer_labels(const LabelMap& mean_labels, const PointCloud& cloud) {
  return transfer_labels(mean_labels, cloud.size());
}

LabelMap aggregate_annotations(const AnnotationSet& set, AggregationPolicy policy);

/// |{A = c} ∩ {GT = c}| / |{GT = c}|: the share of ground-truth vertices of
/// class c that the annotation recovers. Throws "labeling.undefined_metric"
/// when GT has no vertex of class c.
double annotation_accuracy(const LabelMap& annotated, const LabelMap& ground_truth, ClassId class_id);

/// Same ratio pooled over every non-background class.
double landmark_accuracy(const LabelMap& annotated, const LabelMap& ground_truth);

struct StudyRow {
  std::string shape_id;
  std::optional<ClassId> class_id;  ///< empty for the all-landmarks row
  double accuracy = 0.0;
};

struct StudyReport {
  AggregationPolicy policy = AggregationPolicy::union_;
  std::vector<StudyRow> rows;
  double overall = 0.0;                     ///< mean over shapes of the pooled accuracy
  std::map<ClassId, double> per_class;      ///< mean over shapes that contain the class
  ClassTable class_table;
};

struct StudyShape {
  AnnotationSet annotations;
  LabelMap ground_truth;
};

StudyReport run_study(const std::vector<StudyShape>& shapes, AggregationPolicy policy);

/// CSV with columns shape_id,class_id,accuracy. Summary rows use shape_id
/// "ALL"; the pooled class column is "all".
std::string study_report_csv(const StudyReport& report);

}  // namespace ssmgen::labeling
