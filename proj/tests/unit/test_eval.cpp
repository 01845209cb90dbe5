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

#include "helpers.hpp"

#include "oracles/oracles.hpp"
#include "ssmgen/eval.hpp"

#include <json.hpp>

#include <map>

using namespace ssmgen;
using namespace ssmgen::eval;

namespace {

LabelMap lm(std::vector<ClassId> v) { return LabelMap(std::move(v), ClassTable::landmarks()); }

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("iou matches the set oracle") {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    std::vector<ClassId> g(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = static_cast<ClassId>(rng.below(3));
      p[i] = static_cast<ClassId>(rng.below(3));
    }
    for (ClassId c : {0, 1, 2}) CHECK(iou(lm(g), lm(p), c) == oracle::iou(lm(g), lm(p), c));
  }
}

TEST_CASE("iou edge cases") {
  const LabelMap x = lm({0, 1, 1, 2, 0});
  for (ClassId c : {0, 1, 2}) CHECK(iou(x, x, c) == 1.0);
  CHECK(iou(lm({1, 1, 0}), lm({0, 0, 1}), 1) == 0.0);
  CHECK_FALSE(iou(lm({0, 0}), lm({0, 1}), 2).has_value());
  CHECK_ERROR_CODE(iou(lm({0}), lm({0, 1}), 0), "eval.length");
}

TEST_CASE("mIoU and class policy") {
  const LabelMap g = lm({0, 0, 1, 1});
  const LabelMap p = lm({0, 1, 1, 1});
  // background 1/2, ridge 2/3, ligament absent from both and skipped.
  CHECK(miou_shape(g, p) == doctest::Approx((0.5 + 2.0 / 3.0) / 2.0));
  ClassPolicy no_bg;
  no_bg.include_background = false;
  CHECK(miou_shape(g, p, no_bg) == doctest::Approx(2.0 / 3.0));
  CHECK_ERROR_CODE(miou_shape(lm({0, 0}), lm({0, 0}), no_bg), "eval.undefined_metric");
}

TEST_CASE("dataset level averages") {
  const auto r = evaluate({{"a", lm({0, 1, 2}), lm({0, 1, 2})}, {"b", lm({0, 1, 1}), lm({0, 1, 0})}});
  REQUIRE(r.shapes.size() == 2);
  CHECK(r.shapes[0].miou == 1.0);
  // b: background 1/2, ridge 1/2.
  CHECK(r.shapes[1].miou == 0.5);
  CHECK(r.mean_miou == 0.75);
  CHECK(r.class_mean_iou.at(2) == 1.0);  // only shape a has class 2
  CHECK(r.class_mean_iou.at(1) == 0.75);
  const auto doc = nlohmann::json::parse(report_to_json(r));
  CHECK(doc["dataset"]["mean_miou"].get<double>() == 0.75);
  CHECK(doc["config"]["include_background"].get<bool>());
  CHECK(report_to_csv(r).rfind("shape_id,miou,iou_0,iou_1,iou_2\na,1,1,1,1\nb,0.5,0.5,0.5,\n", 0) == 0);
}

TEST_CASE("worked examples") {
  std::vector<ClassId> g(16, 0), p(16, 0);
  for (int i = 1; i <= 10; ++i) g[i] = 1;
  for (int i = 6; i <= 15; ++i) p[i] = 1;
  CHECK(iou(lm(g), lm(p), 1) == 5.0 / 15.0);
  // Background 1 and ridge 0 average to 0.5.
  CHECK(miou_shape(lm({0, 0, 1}), lm({0, 0, 2}), ClassPolicy{}) == doctest::Approx((1.0 + 0.0 + 0.0) / 3.0));
  CHECK(miou_shape(lm({0, 0, 1, 1}), lm({0, 0, 0, 0}), ClassPolicy{}) == 0.25);
  ClassPolicy no_bg;
  no_bg.include_background = false;
  CHECK(miou_shape(lm({1, 1, 2, 2}), lm({1, 1, 1, 1}), no_bg) == 0.25);
  // Single-class shape.
  CHECK(miou_shape(lm({0, 0, 0}), lm({0, 0, 0})) == 1.0);
  // Hand-built 6-point case: background 2/3, ridge 1/3, ligament 1/2.
  const LabelMap g6 = lm({0, 0, 0, 1, 1, 2});
  const LabelMap p6 = lm({0, 0, 1, 1, 2, 2});
  CHECK(miou_shape(g6, p6) == doctest::Approx((2.0 / 3.0 + 1.0 / 3.0 + 0.5) / 3.0));
  CHECK(miou_shape(g6, p6, no_bg) == doctest::Approx((1.0 / 3.0 + 0.5) / 2.0));
}

TEST_CASE("perfect and all-background predictions") {
  const LabelMap g = lm({0, 1, 1, 2, 0, 2});
  const auto perfect = evaluate({{"a", g, g}});
  for (const auto& [c, v] : perfect.class_mean_iou) CHECK(v == 1.0);
  const auto bg = evaluate({{"a", g, lm({0, 0, 0, 0, 0, 0})}});
  CHECK(bg.class_mean_iou.at(1) == 0.0);
  CHECK(bg.class_mean_iou.at(2) == 0.0);
}

TEST_CASE("symmetry, flip monotonicity and exact means") {
  Rng rng(13);
  std::vector<ShapePair> pairs;
  for (int s = 0; s < 3; ++s) {
    std::vector<ClassId> g(12), p(12);
    for (int i = 0; i < 12; ++i) {
      g[i] = static_cast<ClassId>(rng.below(3));
      p[i] = rng.uniform() < 0.6 ? g[i] : static_cast<ClassId>(rng.below(3));
    }
    for (ClassId c : {0, 1, 2}) {
      CHECK(iou(lm(g), lm(p), c) == iou(lm(p), lm(g), c));
      for (int i = 0; i < 12; ++i) {
        if (g[i] != c || p[i] != c) continue;
        auto flipped = p;
        flipped[i] = (c + 1) % 3;
        CHECK(*iou(lm(g), lm(flipped), c) <= *iou(lm(g), lm(p), c));
      }
    }
    pairs.push_back({std::to_string(s), lm(g), lm(p)});
  }
  const auto r = evaluate(pairs);
  double sum = 0.0;
  std::map<ClassId, std::pair<double, int>> per_class;
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    double shape_sum = 0.0;
    int present = 0;
    for (ClassId c : {0, 1, 2}) {
      if (auto v = oracle::iou(pairs[s].ground_truth, pairs[s].prediction, c)) {
        CHECK((*v >= 0.0 && *v <= 1.0));
        CHECK(r.shapes[s].class_iou.at(c) == *v);
        shape_sum += *v;
        ++present;
        per_class[c].first += *v;
        ++per_class[c].second;
      }
    }
    CHECK(std::abs(r.shapes[s].miou - shape_sum / present) < 1e-12);
    sum += r.shapes[s].miou;
  }
  CHECK(std::abs(r.mean_miou - sum / 3.0) < 1e-12);
  for (const auto& [c, acc] : per_class) CHECK(std::abs(r.class_mean_iou.at(c) - acc.first / acc.second) < 1e-12);
}

}  // TEST_SUITE
