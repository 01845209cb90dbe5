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

// ssmgen: command-line front end for the whole pipeline.

#include "ssmgen/annotate_server.hpp"
#include "ssmgen/config.hpp"
#include "ssmgen/datagen.hpp"
#include "ssmgen/error.hpp"
#include "ssmgen/eval.hpp"
#include "ssmgen/fixture.hpp"
#include "ssmgen/labeling.hpp"
#include "ssmgen/mesh_io.hpp"
#include "ssmgen/segmenter.hpp"
#include "ssmgen/ssm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace ssmgen;
using nlohmann::json;

namespace {

std::string kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::data: return "data";
    case ErrorKind::internal: return "internal";
  }
  return "internal";
}

int report_error(const std::string& code, const std::string& message, ErrorKind kind) {
  std::cerr << json{{"error", {{"code", code}, {"kind", kind_name(kind)}, {"message", message}}}}.dump() << "\n";
  return static_cast<int>(kind);
}

// Finds --config before the real parse so file values can become defaults.
std::optional<std::string> prescan_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--") break;
    if (arg == "--config") {
      if (i + 1 >= argc) throw Error("cli.usage", "--config needs a file argument", ErrorKind::usage);
      return std::string(argv[i + 1]);
    }
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

std::vector<fs::path> list_meshes(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("io.read", "cohort directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".obj" || ext == ".ply")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2) throw Error("ssm.cohort", "cohort directory '" + dir.string() + "' holds fewer than 2 meshes");
  return files;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("cli.usage", "bad number '" + item + "' in list", ErrorKind::usage);
    }
  }
  return out;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// --- subcommands -----------------------------------------------------------

int run_fixture(const PipelineConfig& cfg, const std::string& out) {
  const auto fx = fixture::make_fixture(cfg.fixture.n_shapes, cfg.fixture.n_vertices, cfg.fixture.seed);
  fixture::write_fixture(fx, out);
  const auto hist = fx.mean_labels.histogram();
  std::cout << "fixture: " << fx.meshes.size() << " shapes, " << fx.mean_labels.size() << " vertices, class sizes";
  for (const auto& [c, n] : hist) std::cout << " " << c << ":" << n;
  std::cout << " -> " << out << "\n";
  return 0;
}

int run_build_ssm(const PipelineConfig& cfg, const std::string& mean_mesh_out) {
  std::vector<TriangleMesh> meshes;
  for (const auto& f : list_meshes(cfg.paths.cohort_dir)) meshes.push_back(load_mesh(f));
  const Cohort cohort = validate_cohort(std::move(meshes));
  ssm::GpaOptions gpa;
  gpa.with_scaling = cfg.ssm.with_scaling;
  gpa.tolerance = cfg.ssm.gpa_tolerance;
  gpa.max_iterations = cfg.ssm.gpa_max_iterations;
  const auto aligned = ssm::gpa_align(cohort, gpa);
  ssm::Retention retention;
  retention.variance_fraction = cfg.ssm.variance_fraction;
  ssm::SsmModel model = ssm::build_ssm(aligned.cohort, retention);
  model.with_scaling = cfg.ssm.with_scaling;
  ensure_parent(cfg.paths.ssm_model);
  ssm::save_model(model, cfg.paths.ssm_model);
  if (!mean_mesh_out.empty()) {
    ensure_parent(mean_mesh_out);
    save_mesh(model.mean_mesh(), mean_mesh_out);
  }
  std::cout << "build-ssm: K=" << cohort.size() << " N=" << model.vertex_count() << " M=" << model.mode_count()
            << " gpa_iterations=" << aligned.iterations << " -> " << cfg.paths.ssm_model << "\n";
  return 0;
}

int run_generate(const PipelineConfig& cfg) {
  const auto model = ssm::load_model(cfg.paths.ssm_model);
  const auto classes = load_class_table(cfg.paths.classes);
  const auto labels = load_labels(cfg.paths.mean_labels, classes, model.vertex_count());
  const auto manifest = datagen::generate_dataset(model, labels, cfg.dataset.config, cfg.dataset.seed,
                                                  cfg.paths.dataset_dir, cfg.dataset.workers);
  std::cout << "generate: " << manifest.records.size() << " shapes (" << cfg.dataset.config.n_train << "/"
            << cfg.dataset.config.n_val << "/" << cfg.dataset.config.n_test << ") at " << cfg.dataset.config.n_points
            << " points -> " << cfg.paths.dataset_dir << "\n";
  return 0;
}

int run_transfer(const PipelineConfig& cfg, const std::string& mesh_in, const std::string& params_text,
                 std::uint64_t seed, const std::string& out_labels, const std::string& out_mesh) {
  const auto classes = load_class_table(cfg.paths.classes);
  if (!mesh_in.empty()) {
    const auto mesh = load_mesh(mesh_in);
    const auto mean = load_labels(cfg.paths.mean_labels, classes, mesh.vertex_count());
    const auto labels = labeling::transfer_labels(mean, mesh.vertex_count());
    ensure_parent(out_labels);
    save_labels(labels, out_labels);
    if (!out_mesh.empty()) {
      ensure_parent(out_mesh);
      save_mesh(mesh, out_mesh);
    }
    std::cout << "transfer-labels: " << labels.size() << " vertices -> " << out_labels << "\n";
    return 0;
  }
  const auto model = ssm::load_model(cfg.paths.ssm_model);
  const auto mean = load_labels(cfg.paths.mean_labels, classes, model.vertex_count());
  ssm::ShapeParams params;
  if (!params_text.empty()) {
    const auto values = parse_number_list(params_text);
    if (values.size() > static_cast<std::size_t>(model.mode_count())) {
      throw Error("ssm.dimension", "got " + std::to_string(values.size()) + " parameters for a model with " +
                                       std::to_string(model.mode_count()) + " modes",
                  ErrorKind::usage);
    }
    params = ssm::ShapeParams::Zero(model.mode_count());
    for (std::size_t i = 0; i < values.size(); ++i) params(static_cast<Eigen::Index>(i)) = values[i];
  } else {
    Rng rng(seed);
    params = ssm::sample_params(model, cfg.dataset.config.sigma_lo, cfg.dataset.config.sigma_hi, rng);
  }
  const auto shape = ssm::generate_shape(model, params);
  const auto labels = labeling::transfer_labels(mean, shape);
  ensure_parent(out_labels);
  save_labels(labels, out_labels);
  if (!out_mesh.empty()) {
    ensure_parent(out_mesh);
    save_mesh(model.to_mesh(shape), out_mesh);
  }
  std::cout << "transfer-labels: " << labels.size() << " vertices -> " << out_labels << "\n";
  return 0;
}

int run_train(const PipelineConfig& cfg, bool quiet) {
  const fs::path dir = cfg.paths.dataset_dir;
  const auto manifest = datagen::load_manifest(dir);
  const auto classes = load_class_table(dir / "classes.json");
  const auto train = datagen::load_split(dir, manifest, datagen::Split::train, classes);
  const auto val = datagen::load_split(dir, manifest, datagen::Split::val, classes);
  auto options = cfg.train.options();
  if (!quiet) {
    options.on_epoch = [&](const segmenter::EpochStats& s) {
      std::fprintf(stderr, "epoch %3zu/%zu  train_loss %.6f  val_loss %.6f\n", s.epoch + 1, options.epochs,
                   s.train_loss, s.val_loss);
    };
  }
  const auto model = segmenter::train(train, val, options);
  ensure_parent(cfg.paths.segmenter_model);
  segmenter::save_model(model, cfg.paths.segmenter_model);
  std::cout << "train: " << train.size() << " clouds, " << options.epochs << " epochs -> "
            << cfg.paths.segmenter_model << "\n";
  return 0;
}

int run_predict(const PipelineConfig& cfg) {
  const fs::path dir = cfg.paths.dataset_dir;
  const auto model = segmenter::load_model(cfg.paths.segmenter_model);
  const auto manifest = datagen::load_manifest(dir);
  const auto classes = load_class_table(dir / "classes.json");
  const fs::path out = cfg.paths.predictions_dir;
  fs::create_directories(out);
  std::size_t count = 0;
  for (const auto* r : manifest.split(cfg.eval.split)) {
    const auto input = datagen::load_xyzl(dir / r->file, classes, r->id);
    datagen::LabeledCloud pred{input.cloud, segmenter::predict(model, input.cloud), r->id};
    datagen::save_xyzl(pred, out / datagen::shape_file_name(r->id));
    ++count;
  }
  std::cout << "predict: " << count << " " << datagen::split_name(cfg.eval.split) << " clouds -> " << out.string()
            << "\n";
  return 0;
}

int run_evaluate(const PipelineConfig& cfg, const std::string& csv_out) {
  const fs::path dir = cfg.paths.dataset_dir;
  const auto manifest = datagen::load_manifest(dir);
  const auto classes = load_class_table(dir / "classes.json");
  eval::ClassPolicy policy;
  policy.include_background = cfg.eval.include_background;
  const auto report =
      eval::evaluate_dataset(dir, manifest, cfg.paths.predictions_dir, classes, policy, cfg.eval.split);
  ensure_parent(cfg.paths.report);
  write_text_file(cfg.paths.report, eval::report_to_json(report));
  if (!csv_out.empty()) {
    ensure_parent(csv_out);
    write_text_file(csv_out, eval::report_to_csv(report));
  }
  std::cout << eval::report_to_text(report);
  return 0;
}

// Study manifest:
//   {"classes": "classes.json",
//    "shapes": [{"id": "s01", "ground_truth": "s01_gt.csv",
//                "annotations": [{"annotator": "r1", "labels": "s01_r1.csv"}, ...]}, ...]}
// Paths are relative to the manifest. An optional per-shape "vertex_count"
// fixes the map length; otherwise it follows the ground-truth file.
int run_study(const std::string& manifest_path, const std::string& policy_text, const std::string& out) {
  const fs::path base = fs::path(manifest_path).parent_path();
  json doc;
  try {
    doc = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw Error("study.manifest", manifest_path + ": " + e.what());
  }
  std::vector<labeling::StudyShape> shapes;
  try {
    const auto classes = load_class_table(base / doc.at("classes").get<std::string>());
    for (const auto& s : doc.at("shapes")) {
      const std::string id = s.at("id").is_string() ? s.at("id").get<std::string>() : s.at("id").dump();
      std::optional<std::size_t> n;
      if (s.contains("vertex_count")) n = s.at("vertex_count").get<std::size_t>();
      auto gt = load_labels(base / s.at("ground_truth").get<std::string>(), classes, n);
      std::vector<LabelMap> maps;
      std::vector<std::string> annotators;
      for (const auto& a : s.at("annotations")) {
        maps.push_back(load_labels(base / a.at("labels").get<std::string>(), classes, gt.size()));
        annotators.push_back(a.value("annotator", std::to_string(annotators.size())));
      }
      shapes.push_back({labeling::AnnotationSet(id, std::move(maps), std::move(annotators)), std::move(gt)});
    }
  } catch (const json::exception& e) {
    throw Error("study.manifest", manifest_path + ": " + e.what());
  }
  const auto report = labeling::run_study(shapes, labeling::parse_policy(policy_text));
  if (!out.empty()) {
    ensure_parent(out);
    write_text_file(out, labeling::study_report_csv(report));
  }
  std::printf("study: %zu shapes, policy %s\n", shapes.size(), labeling::policy_name(report.policy).c_str());
  std::printf("%-28s %7.2f%%\n", "accuracy (all landmarks)", 100.0 * report.overall);
  for (const auto& [c, v] : report.per_class) {
    const std::string name = report.class_table.contains(c) ? report.class_table.at(c).name : std::to_string(c);
    std::printf("%-28s %7.2f%%\n", ("accuracy " + name).c_str(), 100.0 * v);
  }
  return 0;
}

int run_serve(const PipelineConfig& cfg, const std::string& mesh_in, const std::string& labels_path,
              ServeOptions options) {
  const auto classes = load_class_table(cfg.paths.classes);
  const TriangleMesh mesh =
      mesh_in.empty() ? ssm::load_model(cfg.paths.ssm_model).mean_mesh() : load_mesh(mesh_in);
  LabelMap labels = fs::exists(labels_path)
                        ? load_labels(labels_path, classes, mesh.vertex_count())
                        : LabelMap(std::vector<ClassId>(mesh.vertex_count(), kBackground), classes);
  options.labels_path = labels_path;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  AnnotateServer server(mesh, std::move(labels), options);
  const int port = server.bind();
  std::thread([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  }).detach();
  std::cerr << "annotate-serve: http://" << options.host << ":" << port << "/ (labels -> " << labels_path
            << ")" << std::endl;
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  PipelineConfig cfg;
  std::string config_path;
  try {
    if (auto path = prescan_config(argc, argv)) {
      config_path = *path;
      cfg = load_config(*path);
    }
  } catch (const ssmgen::Error& e) {
    return report_error(e.code(), e.what(), ErrorKind::usage);
  }

  CLI::App app{"ssmgen: statistical shape models and annotated training data for landmark segmentation"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", config_path, "JSON pipeline config; its values become the defaults below");

  auto& paths = cfg.paths;
  std::string downsample = cfg.dataset.config.downsample == datagen::DownsampleMode::fps ? "fps" : "random";
  std::string split = datagen::split_name(cfg.eval.split);
  std::optional<double> variance_fraction = cfg.ssm.variance_fraction;

  // fixture
  std::string fixture_out = "fixture";
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic corresponded cohort with mean-shape labels");
  fixture->add_option("--n-shapes", cfg.fixture.n_shapes, "Number of shapes (>= 2)");
  fixture->add_option("--n-vertices", cfg.fixture.n_vertices, "Minimum vertices per shape (>= 100)");
  fixture->add_option("--seed", cfg.fixture.seed, "Random seed");
  fixture->add_option("--out", fixture_out, "Output directory (meshes/, mean_labels.csv, classes.json)");

  // build-ssm
  std::string mean_mesh_out;
  auto* build = app.add_subcommand("build-ssm", "Align a corresponded cohort and build the shape model");
  build->add_option("--cohort", paths.cohort_dir, "Directory of corresponded .obj/.ply meshes");
  build->add_option("--out", paths.ssm_model, "Model file to write");
  build->add_option("--with-scaling", cfg.ssm.with_scaling, "Remove isotropic scale during alignment");
  build->add_option("--gpa-tolerance", cfg.ssm.gpa_tolerance, "Alignment convergence threshold (RMS, mesh units)");
  build->add_option("--gpa-max-iterations", cfg.ssm.gpa_max_iterations, "Alignment iteration cap");
  build->add_option("--variance-fraction", variance_fraction,
                    "Keep the fewest modes explaining this share of variance (default: all nonzero modes)")
      ->check(CLI::Range(0.0, 1.0));
  build->add_option("--mean-mesh", mean_mesh_out, "Also write the mean shape as a mesh (for annotation)");

  // generate
  auto& d = cfg.dataset.config;
  auto* generate = app.add_subcommand("generate", "Generate an annotated point-cloud dataset from the model");
  generate->add_option("--model", paths.ssm_model, "Shape model file");
  generate->add_option("--labels", paths.mean_labels, "Mean-shape labels (CSV)");
  generate->add_option("--classes", paths.classes, "Class table (JSON)");
  generate->add_option("--out", paths.dataset_dir, "Dataset directory");
  generate->add_option("--seed", cfg.dataset.seed, "Master seed");
  generate->add_option("--workers", cfg.dataset.workers, "Worker threads (outputs do not depend on this)")
      ->check(CLI::PositiveNumber);
  generate->add_option("--n-train", d.n_train, "Training shapes");
  generate->add_option("--n-val", d.n_val, "Validation shapes");
  generate->add_option("--n-test", d.n_test, "Test shapes");
  generate->add_option("--n-points", d.n_points, "Points per cloud");
  generate->add_option("--sigma-lo", d.sigma_lo, "Lower bound of the shape parameters (standard deviations)");
  generate->add_option("--sigma-hi", d.sigma_hi, "Upper bound of the shape parameters (standard deviations)");
  generate->add_option("--rotate-train", d.rotate_train, "Randomly rotate training clouds");
  generate->add_option("--rotate-val", d.rotate_val, "Randomly rotate validation clouds");
  generate->add_option("--rotate-test", d.rotate_test, "Randomly rotate test clouds");
  generate->add_option("--downsample", downsample, "Downsampling: fps or random")
      ->check(CLI::IsMember({"fps", "random"}));
  generate->add_option("--fps-start", d.fps_start, "Start vertex for farthest point sampling");

  // transfer-labels
  std::string transfer_mesh, transfer_params, transfer_out = "out/shape_labels.csv", transfer_mesh_out;
  std::uint64_t transfer_seed = 0;
  auto* transfer = app.add_subcommand("transfer-labels", "Carry the mean-shape labels onto one shape");
  transfer->add_option("--model", paths.ssm_model, "Shape model file");
  transfer->add_option("--labels", paths.mean_labels, "Mean-shape labels (CSV)");
  transfer->add_option("--classes", paths.classes, "Class table (JSON)");
  transfer->add_option("--mesh", transfer_mesh, "Corresponded mesh to label instead of generating one");
  transfer->add_option("--params", transfer_params, "Comma-separated shape parameters; missing ones are 0");
  transfer->add_option("--seed", transfer_seed, "Seed for drawing parameters when --params is absent");
  transfer->add_option("--sigma-lo", d.sigma_lo, "Lower bound for drawn parameters");
  transfer->add_option("--sigma-hi", d.sigma_hi, "Upper bound for drawn parameters");
  transfer->add_option("--out", transfer_out, "Labels to write (CSV)");
  transfer->add_option("--out-mesh", transfer_mesh_out, "Also write the labelled shape as a mesh");

  // train
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train the point-cloud segmenter on a generated dataset");
  train->add_option("--dataset", paths.dataset_dir, "Dataset directory");
  train->add_option("--out", paths.segmenter_model, "Segmenter model file to write");
  train->add_option("--epochs", cfg.train.epochs, "Training epochs");
  train->add_option("--lr", cfg.train.lr, "Adam learning rate");
  train->add_option("--batch-size", cfg.train.batch_size, "Clouds per optimizer step")->check(CLI::PositiveNumber);
  train->add_option("--seed", cfg.train.seed, "Seed for initialization and batch order");
  train->add_option("--hidden", cfg.train.hidden, "Hidden layer widths");
  train->add_option("--class-weight-cap", cfg.train.class_weight_cap, "Upper bound of the class weights");
  train->add_option("--k-local", cfg.train.features.k_local, "Smallest neighbourhood for point descriptors");
  train->add_option("--scales", cfg.train.features.scales, "Further neighbourhood sizes");
  train->add_option("--workers", cfg.train.workers, "Feature extraction threads (results do not depend on this)")
      ->check(CLI::PositiveNumber);
  train->add_flag("--quiet", quiet, "Do not log per-epoch losses");

  // predict
  auto* predict = app.add_subcommand("predict", "Label the clouds of one dataset split with a trained segmenter");
  predict->add_option("--model", paths.segmenter_model, "Segmenter model file");
  predict->add_option("--dataset", paths.dataset_dir, "Dataset directory");
  predict->add_option("--split", split, "Split to label")->check(CLI::IsMember({"train", "val", "test"}));
  predict->add_option("--out", paths.predictions_dir, "Directory for predicted shape_<id>.xyzl files");

  // evaluate
  std::string csv_out;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against the dataset labels (IoU, mIoU)");
  evaluate->add_option("--dataset", paths.dataset_dir, "Dataset directory");
  evaluate->add_option("--predictions", paths.predictions_dir, "Directory of predicted shape_<id>.xyzl files");
  evaluate->add_option("--split", split, "Split to score")->check(CLI::IsMember({"train", "val", "test"}));
  evaluate->add_option("--include-background", cfg.eval.include_background, "Count background in mIoU");
  evaluate->add_option("--out", paths.report, "JSON report to write");
  evaluate->add_option("--csv", csv_out, "Also write per-shape results as CSV");

  // study
  std::string study_manifest, study_policy = "union", study_out;
  auto* study = app.add_subcommand("study", "Aggregate several annotators and report annotation accuracy");
  study->add_option("--manifest", study_manifest, "Study manifest (JSON)")->required();
  study->add_option("--policy", study_policy, "Aggregation: union or majority")
      ->check(CLI::IsMember({"union", "majority"}));
  study->add_option("--out", study_out, "CSV report to write");

  // annotate-serve
  std::string serve_mesh, serve_labels = paths.mean_labels;
  ServeOptions serve_options;
  auto* serve = app.add_subcommand("annotate-serve", "Serve the annotation backend on a loopback address");
  serve->add_option("--mesh", serve_mesh, "Mesh to annotate (default: mean shape of --model)");
  serve->add_option("--model", paths.ssm_model, "Shape model whose mean is annotated");
  serve->add_option("--classes", paths.classes, "Class table (JSON)");
  serve->add_option("--labels", serve_labels, "Label file loaded at start and rewritten on every save");
  serve->add_option("--host", serve_options.host, "Loopback address to bind");
  serve->add_option("--port", serve_options.port, "Port (0 picks a free one)");
  serve->add_option("--ui-dir", serve_options.ui_dir, "Directory with the UI bundle, served at /");

  // config
  std::string config_out;
  auto* config = app.add_subcommand("config", "Print or write the effective configuration");
  config->add_option("--out", config_out, "File to write (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("cli.usage", e.what(), ErrorKind::usage);
  }

  try {
    d.downsample = downsample == "random" ? datagen::DownsampleMode::random : datagen::DownsampleMode::fps;
    cfg.eval.split = datagen::parse_split(split);
    cfg.ssm.variance_fraction = variance_fraction;
    if (!(d.sigma_lo < d.sigma_hi)) throw ssmgen::Error("cli.usage", "--sigma-lo must be below --sigma-hi", ErrorKind::usage);

    if (fixture->parsed()) return run_fixture(cfg, fixture_out);
    if (build->parsed()) return run_build_ssm(cfg, mean_mesh_out);
    if (generate->parsed()) return run_generate(cfg);
    if (transfer->parsed())
      return run_transfer(cfg, transfer_mesh, transfer_params, transfer_seed, transfer_out, transfer_mesh_out);
    if (train->parsed()) return run_train(cfg, quiet);
    if (predict->parsed()) return run_predict(cfg);
    if (evaluate->parsed()) return run_evaluate(cfg, csv_out);
    if (study->parsed()) return run_study(study_manifest, study_policy, study_out);
    if (serve->parsed()) return run_serve(cfg, serve_mesh, serve_labels, serve_options);
    if (config->parsed()) {
      if (config_out.empty()) {
        std::cout << config_to_json(cfg);
      } else {
        save_config(cfg, config_out);
      }
      return 0;
    }
    return report_error("cli.usage", "no subcommand", ErrorKind::usage);
  } catch (const ssmgen::Error& e) {
    return report_error(e.code(), e.what(), e.kind());
  } catch (const fs::filesystem_error& e) {
    return report_error("io.filesystem", e.what(), ErrorKind::internal);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), ErrorKind::internal);
  }
}
