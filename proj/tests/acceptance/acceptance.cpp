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

// Acceptance suite: one PASS/FAIL line per criterion.
// usage: acceptance <path to ssmgen binary> [scratch dir]

#include "oracles/oracles.hpp"
#include "ssmgen/datagen.hpp"
#include "ssmgen/error.hpp"
#include "ssmgen/eval.hpp"
#include "ssmgen/fixture.hpp"
#include "ssmgen/labeling.hpp"
#include "ssmgen/mesh_io.hpp"
#include "ssmgen/segmenter.hpp"
#include "ssmgen/ssm.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

using namespace ssmgen;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Eigen::Matrix3d random_rotation(Rng& rng) {
  return Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized().toRotationMatrix();
}

// Shared desk cohort: 10 shapes of about 2000 vertices.
const fixture::Fixture& desk_fixture() {
  static const fixture::Fixture fx = fixture::make_fixture(10, 2000, 7);
  return fx;
}

Outcome ssm_exactness() {
  const auto t0 = Clock::now();
  const auto aligned = ssm::gpa_align(validate_cohort(desk_fixture().meshes));
  const auto model = ssm::build_ssm(aligned.cohort);
  const auto mean = ssm::generate_shape(model, ssm::ShapeParams::Zero(model.mode_count()));
  const bool mean_exact = (mean.array() == model.mean.array()).all();
  double worst_rel = 0.0;
  for (std::size_t k = 0; k < aligned.cohort.size(); ++k) {
    const Eigen::VectorXd x = flatten(aligned.cohort[k].vertices());
    const Eigen::VectorXd back = ssm::generate_shape(model, ssm::project(model, x));
    worst_rel = std::max(worst_rel, (back - x).norm() / (x - model.mean).norm());
  }
  const auto m = static_cast<Eigen::Index>(model.mode_count());
  const double ortho =
      (model.components.transpose() * model.components - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = mean_exact && worst_rel < 1e-6 && ortho < 1e-8 && t < 10.0;
  o.detail = std::string("mean bit-exact=") + (mean_exact ? "yes" : "no") + fmt(" worst rel RMS=%.2e", worst_rel) +
             fmt(" |VtV-I|max=%.2e", ortho) + fmt(" time=%.2fs", t);
  return o;
}

Outcome procrustes_oracle() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int cohort = 0; cohort < 10; ++cohort) {
    const Points base = desk_fixture().meshes[static_cast<std::size_t>(cohort)].vertices();
    std::vector<TriangleMesh> copies;
    for (int i = 0; i < 8; ++i) {
      const Eigen::Matrix3d r = random_rotation(rng);
      const Eigen::RowVector3d t(100 * rng.normal(), 100 * rng.normal(), 100 * rng.normal());
      copies.emplace_back(Points((base * r.transpose()).rowwise() + t), desk_fixture().meshes[0].faces());
    }
    const auto aligned = ssm::gpa_align(validate_cohort(std::move(copies)));
    for (std::size_t i = 0; i < aligned.cohort.size(); ++i) {
      for (std::size_t j = i + 1; j < aligned.cohort.size(); ++j) {
        worst = std::max(worst, ssm::rms_distance(aligned.cohort[i].vertices(), aligned.cohort[j].vertices()));
      }
    }
    // The recovered shape is the base shape up to a rotation (quaternion oracle).
    const Points ref = oracle::centred(base);
    const Points got = aligned.cohort[0].vertices();
    worst = std::max(worst, ssm::rms_distance(ref * oracle::horn_rotation(ref, got).transpose(), got));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-6 && t < 5.0, fmt("10 cohorts x 8 rigid copies, worst RMS=%.2e", worst) + fmt(" time=%.2fs", t)};
}

Outcome label_transfer() {
  const auto& fx = desk_fixture();
  const auto model = ssm::build_ssm(ssm::gpa_align(validate_cohort(fx.meshes)).cohort);
  const auto expected = fx.mean_labels.histogram();
  Rng rng(102);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = ssm::generate_shape(model, ssm::sample_params(model, ssm::kDefaultSigmaLo, ssm::kDefaultSigmaHi, rng));
    if (labeling::transfer_labels(fx.mean_labels, x).histogram() != expected) ++mismatches;
  }
  std::ostringstream d;
  d << "100 shapes, class counts";
  for (const auto& [c, n] : expected) d << " " << c << ":" << n;
  d << ", mismatching shapes=" << mismatches;
  return {mismatches == 0, d.str()};
}

Outcome fps_oracle() {
  const auto t0 = Clock::now();
  Rng rng(103);
  std::size_t compared = 0, wrong = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng.below(64);
    Points p(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (int j = 0; j < 3; ++j) {
        // Every fourth cloud sits on an integer grid to force distance ties.
        p(i, j) = c % 4 == 0 ? static_cast<double>(rng.below(4)) : rng.normal();
      }
    }
    const PointCloud cloud(p);
    for (std::size_t m = 1; m <= n; ++m) {
      ++compared;
      if (datagen::fps(cloud, m) != oracle::fps(p, m, 0)) ++wrong;
    }
  }
  const double t = seconds_since(t0);
  return {wrong == 0 && t < 30.0, "200 clouds, " + std::to_string(compared) + " (cloud, m) pairs, mismatches=" +
                                      std::to_string(wrong) + fmt(" time=%.2fs", t)};
}

Outcome metric_oracles() {
  Rng rng(104);
  const ClassTable table = ClassTable::landmarks();
  std::size_t checks = 0, wrong = 0;
  auto random_map = [&](std::size_t n) {
    std::vector<ClassId> v(n);
    for (auto& x : v) x = static_cast<ClassId>(rng.below(3));
    return LabelMap(std::move(v), table);
  };
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(16);
    const LabelMap a = random_map(n);
    const LabelMap b = random_map(n);
    for (ClassId c : table.ids()) {
      ++checks;
      if (eval::iou(a, b, c) != oracle::iou(a, b, c)) ++wrong;
      if (eval::iou(a, a, c) != (oracle::members(a, c).empty() ? std::nullopt : std::optional<double>(1.0))) ++wrong;
      const auto ref = oracle::accuracy(a, b, c);
      try {
        const double got = labeling::annotation_accuracy(a, b, c);
        if (!ref || got != *ref) ++wrong;
      } catch (const Error& e) {
        if (ref || e.code() != "labeling.undefined_metric") ++wrong;
      }
    }
    // Disjoint maps score 0 for every class either side uses.
    std::vector<ClassId> shifted(a.labels());
    for (auto& x : shifted) x = (x + 1) % 3;
    const LabelMap d(shifted, table);
    for (ClassId c : table.ids()) {
      if (auto v = eval::iou(a, d, c); v && *v != 0.0) ++wrong;
    }
  }
  return {wrong == 0, "1000 random map pairs, " + std::to_string(checks) + " class checks, mismatches=" +
                          std::to_string(wrong)};
}

Outcome rotation_invariance(const segmenter::SegmenterModel& model, const PointCloud& cloud) {
  const Eigen::MatrixXd base = segmenter::extract_features(cloud, model.features);
  const LabelMap base_pred = segmenter::predict(model, cloud);
  Rng rng(105);
  double worst = 0.0;
  int differing = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Matrix3d r = random_rotation(rng);
    const PointCloud rotated(Points(cloud.points() * r.transpose()));
    worst = std::max(worst, (segmenter::extract_features(rotated, model.features) - base).cwiseAbs().maxCoeff());
    if (!(segmenter::predict(model, rotated) == base_pred)) ++differing;
  }
  return {worst < 1e-9 && differing == 0, "100 rotations of a " + std::to_string(cloud.size()) +
                                              "-point cloud" + fmt(", max feature diff=%.2e", worst) +
                                              ", differing predictions=" + std::to_string(differing)};
}

Outcome gradient_check() {
  Rng rng(106);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.below(5), h = 2 + rng.below(6), c = 2 + rng.below(3);
    std::vector<std::size_t> sizes{d, h};
    if (trial % 2) sizes.push_back(2 + rng.below(6));
    sizes.push_back(c);
    segmenter::Mlp net(sizes);
    net.initialize(rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(9, static_cast<Eigen::Index>(d), [&] { return rng.normal(); });
    std::vector<int> y(9);
    for (auto& v : y) v = static_cast<int>(rng.below(c));
    Eigen::VectorXd w(static_cast<Eigen::Index>(c));
    for (auto& v : w) v = rng.uniform(0.5, 5.0);
    const auto lg = net.loss_and_gradient(x, y, w);
    segmenter::Mlp probe = net;
    const double step = 1e-5;
    Eigen::VectorXd numeric(lg.gradient.size());
    for (Eigen::Index i = 0; i < numeric.size(); ++i) {
      const double keep = probe.parameters()(i);
      probe.parameters()(i) = keep + step;
      const double up = probe.loss(x, y, w);
      probe.parameters()(i) = keep - step;
      const double down = probe.loss(x, y, w);
      probe.parameters()(i) = keep;
      numeric(i) = (up - down) / (2 * step);
    }
    worst = std::max(worst, (lg.gradient - numeric).norm() / std::max(1e-12, lg.gradient.norm() + numeric.norm()));
  }
  return {worst < 1e-4, fmt("20 models, worst relative error=%.2e", worst)};
}

bool run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()) == 0; }

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return out;
}

Outcome determinism(const std::string& bin, const fs::path& scratch) {
  const fs::path dir = scratch / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cd = "cd '" + dir.string() + "' && '" + bin + "' ";
  const std::string gen = "generate --n-train 40 --n-val 10 --n-test 10 --n-points 1024 --seed 11 ";
  const bool ok = run(cd + "fixture --n-shapes 10 --n-vertices 2000 --seed 7") && run(cd + "build-ssm") &&
                  run(cd + gen + "--workers 1 --out run_a") && run(cd + gen + "--workers 4 --out run_b") &&
                  run(cd + gen + "--workers 3 --out run_c");
  if (!ok) return {false, "a CLI step failed"};
  const auto a = read_tree(dir / "run_a");
  const bool same = a == read_tree(dir / "run_b") && a == read_tree(dir / "run_c");
  return {same && a.count("manifest.json") == 1 && a.size() == 62,
          std::to_string(a.size()) + " files per run, workers 1/4/3 byte-identical=" + (same ? "yes" : "no")};
}

struct EndToEnd {
  Outcome outcome;
  segmenter::SegmenterModel model;
  std::optional<PointCloud> test_cloud;
};

EndToEnd end_to_end(const fs::path& scratch) {
  const auto t0 = Clock::now();
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  const auto& fx = desk_fixture();
  const auto aligned = ssm::gpa_align(validate_cohort(fx.meshes));
  const auto model = ssm::build_ssm(aligned.cohort);

  datagen::DatasetConfig cfg;
  cfg.n_train = 200;
  cfg.n_val = 50;
  cfg.n_test = 50;
  cfg.n_points = 1024;
  const fs::path dir = scratch / "desk_dataset";
  fs::remove_all(dir);
  const auto manifest = datagen::generate_dataset(model, fx.mean_labels, cfg, 42, dir, workers);
  const ClassTable& classes = fx.mean_labels.class_table();
  const auto train = datagen::load_split(dir, manifest, datagen::Split::train, classes);
  const auto val = datagen::load_split(dir, manifest, datagen::Split::val, classes);
  const auto test = datagen::load_split(dir, manifest, datagen::Split::test, classes);

  segmenter::TrainOptions opt;
  opt.epochs = 50;
  opt.workers = workers;
  auto seg = segmenter::train(train, val, opt);

  std::vector<eval::ShapePair> pairs;
  for (const auto& c : test) pairs.push_back({std::to_string(c.shape_id), c.labels, segmenter::predict(seg, c.cloud)});
  const auto report = eval::evaluate(pairs);
  const double t = seconds_since(t0);

  const double ridge = report.class_mean_iou.at(1);
  const double ligament = report.class_mean_iou.at(2);
  bool test_rotated = true;
  for (const auto* r : manifest.split(datagen::Split::test)) test_rotated = test_rotated && !r->rotation.isIdentity();

  EndToEnd e;
  e.outcome.pass = report.mean_miou >= 0.60 && ridge >= 0.40 && ligament >= 0.40 && t < 600.0 && test_rotated;
  e.outcome.detail = fmt("mIoU=%.4f", report.mean_miou) + fmt(" background=%.4f", report.class_mean_iou.at(0)) +
                     fmt(" ridge=%.4f", ridge) + fmt(" ligament=%.4f", ligament) +
                     " epochs=50 test_rotated=" + (test_rotated ? "yes" : "no") + fmt(" time=%.1fs", t);
  e.model = std::move(seg);
  e.test_cloud = test.front().cloud;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <ssmgen binary> [scratch dir]\n", argv[0]);
    return 2;
  }
  const std::string bin = fs::absolute(argv[1]).string();
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "ssmgen_acceptance";
  fs::create_directories(scratch);

  std::vector<std::pair<std::string, Outcome>> results;
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  results.emplace_back("ssm_exactness", guarded(ssm_exactness));
  results.emplace_back("procrustes_oracle", guarded(procrustes_oracle));
  results.emplace_back("label_transfer_counts", guarded(label_transfer));
  results.emplace_back("fps_oracle", guarded(fps_oracle));
  results.emplace_back("metric_oracles", guarded(metric_oracles));

  std::optional<EndToEnd> e2e;
  try {
    e2e = end_to_end(scratch);
  } catch (const std::exception& e) {
    e2e.reset();
    results.emplace_back("end_to_end_desk_run", Outcome{false, std::string("exception: ") + e.what()});
  }
  if (e2e) {
    results.emplace_back("rotation_invariance",
                         guarded([&] { return rotation_invariance(e2e->model, *e2e->test_cloud); }));
  } else {
    results.emplace_back("rotation_invariance", Outcome{false, "no trained model"});
  }
  results.emplace_back("gradient_check", guarded(gradient_check));
  results.emplace_back("generate_determinism", guarded([&] { return determinism(bin, scratch); }));
  if (e2e) results.emplace_back("end_to_end_desk_run", e2e->outcome);

  int failed = 0;
  for (const auto& [name, o] : results) {
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  return failed == 0 ? 0 : 1;
}
