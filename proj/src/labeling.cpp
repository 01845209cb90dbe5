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

#include "ssmgen/labeling.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/mesh_io.hpp"

namespace ssmgen::labeling {

AnnotationSet::AnnotationSet(std::string shape_id, std::vector<LabelMap> annotations,
                             std::vector<std::string> annotator_ids)
    : shape_id_(std::move(shape_id)), annotations_(std::move(annotations)), annotator_ids_(std::move(annotator_ids)) {
  if (annotations_.empty()) {
    throw Error("labeling.no_annotators", "shape '" + shape_id_ + "' has no annotations");
  }
  if (annotator_ids_.empty()) {
    for (std::size_t i = 0; i < annotations_.size(); ++i) annotator_ids_.push_back("annotator_" + std::to_string(i));
  }
  if (annotator_ids_.size() != annotations_.size()) {
    throw Error("labeling.annotation_set", "annotator id count does not match annotation count");
  }
  for (const LabelMap& m : annotations_) {
    if (m.size() != annotations_.front().size()) {
      throw Error("labeling.length", "annotations of shape '" + shape_id_ + "' differ in length");
    }
    if (!(m.class_table() == annotations_.front().class_table())) {
      throw Error("labeling.annotation_set", "annotations of shape '" + shape_id_ + "' use different class tables");
    }
  }
}

AggregationPolicy parse_policy(const std::string& name) {
  if (name == "union") return AggregationPolicy::union_;
  if (name == "majority") return AggregationPolicy::majority;
  throw Error("labeling.policy", "unknown aggregation policy '" + name + "' (expected union or majority)",
              ErrorKind::usage);
}

std::string policy_name(AggregationPolicy policy) {
  return policy == AggregationPolicy::union_ ? "union" : "majority";
}

LabelMap transfer_labels(const LabelMap& mean_labels, std::size_t vertex_count) {
  if (mean_labels.size() != vertex_count) {
    throw Error("labeling.length", "mean-shape labels cover " + std::to_string(mean_labels.size()) +
                                       " vertices, target has " + std::to_string(vertex_count));
  }
  return mean_labels;
}

LabelMap aggregate_annotations(const AnnotationSet& set, AggregationPolicy policy) {
  const auto& maps = set.annotations();
  const std::size_t n = maps.front().size();
  const std::size_t voters = maps.size();
  std::vector<ClassId> out(n, kBackground);
  std::map<ClassId, std::size_t> votes;

  for (std::size_t i = 0; i < n; ++i) {
    votes.clear();
    for (const LabelMap& m : maps) {
      if (m[i] != kBackground) ++votes[m[i]];
    }
    // std::map iterates ids ascending, so strict '>' keeps the lowest id on ties.
    ClassId best = kBackground;
    std::size_t best_count = 0;
    for (const auto& [id, count] : votes) {
      if (count > best_count) {
        best = id;
        best_count = count;
      }
    }
    if (policy == AggregationPolicy::union_) {
      out[i] = best;
    } else {
      out[i] = 2 * best_count > voters ? best : kBackground;
    }
  }
  return LabelMap(std::move(out), maps.front().class_table());
}

double annotation_accuracy(const LabelMap& annotated, const LabelMap& ground_truth, ClassId class_id) {
  if (annotated.size() != ground_truth.size()) {
    throw Error("labeling.length", "annotation and ground truth differ in length");
  }
  std::size_t gt = 0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    if (ground_truth[i] != class_id) continue;
    ++gt;
    if (annotated[i] == class_id) ++hit;
  }
  if (gt == 0) {
    throw Error("labeling.undefined_metric",
                "ground truth has no vertex of class " + std::to_string(class_id) + "; accuracy is undefined");
  }
  return static_cast<double>(hit) / static_cast<double>(gt);
}

double landmark_accuracy(const LabelMap& annotated, const LabelMap& ground_truth) {
  if (annotated.size() != ground_truth.size()) {
    throw Error("labeling.length", "annotation and ground truth differ in length");
  }
  std::size_t gt = 0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    if (ground_truth[i] == kBackground) continue;
    ++gt;
    if (annotated[i] == ground_truth[i]) ++hit;
  }
  if (gt == 0) throw Error("labeling.undefined_metric", "ground truth has no landmark vertices");
  return static_cast<double>(hit) / static_cast<double>(gt);
}

StudyReport run_study(const std::vector<StudyShape>& shapes, AggregationPolicy policy) {
  if (shapes.empty()) throw Error("labeling.study", "study has no shapes");
  StudyReport report;
  report.policy = policy;
  report.class_table = shapes.front().ground_truth.class_table();

  std::map<ClassId, std::pair<double, std::size_t>> class_sums;
  double overall_sum = 0.0;
  for (const StudyShape& shape : shapes) {
    const LabelMap aggregated = aggregate_annotations(shape.annotations, policy);
    const auto hist = shape.ground_truth.histogram();
    for (const auto& [id, count] : hist) {
      if (id == kBackground || count == 0) continue;
      const double acc = annotation_accuracy(aggregated, shape.ground_truth, id);
      report.rows.push_back({shape.annotations.shape_id(), id, acc});
      auto& [sum, n] = class_sums[id];
      sum += acc;
      ++n;
    }
    const double pooled = landmark_accuracy(aggregated, shape.ground_truth);
    report.rows.push_back({shape.annotations.shape_id(), std::nullopt, pooled});
    overall_sum += pooled;
  }
  report.overall = overall_sum / static_cast<double>(shapes.size());
  for (const auto& [id, acc] : class_sums) report.per_class[id] = acc.first / static_cast<double>(acc.second);
  return report;
}

std::string study_report_csv(const StudyReport& report) {
  std::string out = "shape_id,class_id,accuracy\n";
  auto row = [&](const std::string& shape, const std::string& cls, double acc) {
    out += shape + ',' + cls + ',' + format_double(acc) + '\n';
  };
  for (const StudyRow& r : report.rows) {
    row(r.shape_id, r.class_id ? std::to_string(*r.class_id) : "all", r.accuracy);
  }
  for (const auto& [id, acc] : report.per_class) row("ALL", std::to_string(id), acc);
  row("ALL", "all", report.overall);
  return out;
}

}  // namespace ssmgen::labeling
