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

#include "ssmgen/datagen.hpp"

#include "ssmgen/error.hpp"
#include "ssmgen/labeling.hpp"
#include "ssmgen/mesh_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace ssmgen::datagen {

namespace {

double squared_distance(const Points& p, Eigen::Index i, const Eigen::Vector3d& q) {
  const double dx = p(i, 0) - q.x();
  const double dy = p(i, 1) - q.y();
  const double dz = p(i, 2) - q.z();
  return dx * dx + dy * dy + dz * dz;
}

void nearest_into(const Points& p, const Eigen::Vector3d& query, std::size_t k,
                  std::vector<std::pair<double, std::size_t>>& scratch, std::size_t* out) {
  const auto n = static_cast<std::size_t>(p.rows());
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = {squared_distance(p, static_cast<Eigen::Index>(i), query), i};
  // Pairs compare by distance, then by index.
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
  for (std::size_t j = 0; j < k; ++j) out[j] = scratch[j].second;
}

}  // namespace

std::vector<std::size_t> fps(const PointCloud& cloud, std::size_t m, std::size_t start_index) {
  const std::size_t n = cloud.size();
  if (m < 1 || m > n) {
    throw Error("datagen.count", "cannot pick " + std::to_string(m) + " of " + std::to_string(n) + " points");
  }
  if (start_index >= n) {
    throw Error("datagen.count", "start index " + std::to_string(start_index) + " out of range");
  }
  const Points& p = cloud.points();
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> picked(n, false);
  std::vector<std::size_t> out;
  out.reserve(m);

  std::size_t current = start_index;
  for (std::size_t step = 0; step < m; ++step) {
    out.push_back(current);
    picked[current] = true;
    if (step + 1 == m) break;
    const Eigen::Vector3d c = cloud.point(current);
    std::size_t best = n;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (picked[i]) continue;
      const double d2 = squared_distance(p, static_cast<Eigen::Index>(i), c);
      if (d2 < min_d2[i]) min_d2[i] = d2;
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    current = best;
  }
  return out;
}

std::vector<std::size_t> knn_indices(const PointCloud& cloud, const Eigen::Vector3d& query, std::size_t k) {
  if (k > cloud.size()) {
    throw Error("datagen.count", "k = " + std::to_string(k) + " exceeds cloud size " + std::to_string(cloud.size()));
  }
  std::vector<std::size_t> out(k);
  std::vector<std::pair<double, std::size_t>> scratch;
  nearest_into(cloud.points(), query, k, scratch, out.data());
  return out;
}

std::vector<std::size_t> knn_table(const PointCloud& cloud, std::size_t k) {
  const std::size_t n = cloud.size();
  if (k > n) throw Error("datagen.count", "k = " + std::to_string(k) + " exceeds cloud size " + std::to_string(n));
  std::vector<std::size_t> table(n * k);
  std::vector<std::pair<double, std::size_t>> scratch;
  for (std::size_t i = 0; i < n; ++i) nearest_into(cloud.points(), cloud.point(i), k, scratch, table.data() + i * k);
  return table;
}

Rotation random_rotation(Rng& rng) {
  Eigen::Vector4d q;
  do {
    q = Eigen::Vector4d(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  } while (q.norm() < 1e-12);
  q.normalize();
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Rotation r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),  //
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),    //
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

LabeledCloud permute(const LabeledCloud& input, const std::vector<std::size_t>& permutation) {
  const Points& src = input.cloud.points();
  Points pts(static_cast<Eigen::Index>(permutation.size()), 3);
  std::vector<ClassId> labels(permutation.size());
  for (std::size_t j = 0; j < permutation.size(); ++j) {
    const std::size_t from = permutation[j];
    if (from >= input.cloud.size()) throw Error("datagen.index", "permutation index out of range");
    pts.row(static_cast<Eigen::Index>(j)) = src.row(static_cast<Eigen::Index>(from));
    labels[j] = input.labels[from];
  }
  return {PointCloud(std::move(pts)), LabelMap(std::move(labels), input.labels.class_table()), input.shape_id};
}

Shuffled shuffle_points(const LabeledCloud& input, Rng& rng) {
  auto perm = rng.permutation(input.cloud.size());
  LabeledCloud out = permute(input, perm);
  return {std::move(out), std::move(perm)};
}

LabeledCloud rotate(const LabeledCloud& input, const Rotation& rotation) {
  Points pts = input.cloud.points() * rotation.transpose();
  return {PointCloud(std::move(pts)), input.labels, input.shape_id};
}

std::string split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw Error("datagen.split", "unknown split '" + name + "'", ErrorKind::usage);
}

Split DatasetConfig::split_of(std::size_t shape_id) const {
  if (shape_id < n_train) return Split::train;
  if (shape_id < n_train + n_val) return Split::val;
  return Split::test;
}

bool DatasetConfig::rotates(Split split) const {
  switch (split) {
    case Split::train: return rotate_train;
    case Split::val: return rotate_val;
    case Split::test: return rotate_test;
  }
  return false;
}

std::vector<const ShapeRecord*> DatasetManifest::split(Split s) const {
  std::vector<const ShapeRecord*> out;
  for (const ShapeRecord& r : records) {
    if (r.split == s) out.push_back(&r);
  }
  return out;
}

std::string shape_file_name(std::uint64_t id) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "shape_%06" PRIu64 ".xyzl", id);
  return buf;
}

std::pair<ShapeRecord, LabeledCloud> make_shape(const ssm::SsmModel& model, const LabelMap& mean_labels,
                                               const DatasetConfig& config, std::uint64_t master_seed,
                                               std::uint64_t id) {
  if (config.n_points < 1 || config.n_points > model.vertex_count()) {
    throw Error("datagen.count", "n_points = " + std::to_string(config.n_points) + " but the model has " +
                                     std::to_string(model.vertex_count()) + " vertices",
                ErrorKind::usage);
  }
  Rng rng = Rng::stream(master_seed, id);

  ShapeRecord record;
  record.id = id;
  record.split = config.split_of(static_cast<std::size_t>(id));
  record.file = split_name(record.split) + "/" + shape_file_name(id);
  record.params = ssm::sample_params(model, config.sigma_lo, config.sigma_hi, rng);

  const ssm::ShapeVector shape = ssm::generate_shape(model, record.params);
  LabeledCloud full{PointCloud(unflatten(shape)), labeling::transfer_labels(mean_labels, shape), id};

  if (config.downsample == DownsampleMode::fps) {
    record.downsample_indices = fps(full.cloud, config.n_points, config.fps_start);
  } else {
    auto perm = rng.permutation(full.cloud.size());
    perm.resize(config.n_points);
    record.downsample_indices = std::move(perm);
  }
  const LabeledCloud reduced = permute(full, record.downsample_indices);

  Shuffled shuffled = shuffle_points(reduced, rng);
  record.permutation = std::move(shuffled.permutation);

  LabeledCloud out = std::move(shuffled.cloud);
  if (config.rotates(record.split)) {
    record.rotation = random_rotation(rng);
    out = rotate(out, record.rotation);
  }
  return {std::move(record), std::move(out)};
}

DatasetManifest generate_dataset(const ssm::SsmModel& model, const LabelMap& mean_labels,
                                 const DatasetConfig& config, std::uint64_t master_seed,
                                 const std::filesystem::path& out_dir, unsigned workers) {
  namespace fs = std::filesystem;
  if (mean_labels.size() != model.vertex_count()) {
    throw Error("datagen.labels", "mean labels cover " + std::to_string(mean_labels.size()) +
                                      " vertices, model has " + std::to_string(model.vertex_count()));
  }
  if (config.n_points < 1 || config.n_points > model.vertex_count()) {
    throw Error("datagen.count", "n_points = " + std::to_string(config.n_points) + " but the model has " +
                                     std::to_string(model.vertex_count()) + " vertices",
                ErrorKind::usage);
  }
  if (!(config.sigma_lo < config.sigma_hi)) {
    throw Error("ssm.range", "sampling range needs lo < hi", ErrorKind::usage);
  }
  workers = std::max(1u, workers);

  std::error_code ec;
  for (const char* dir : {"train", "val", "test"}) {
    fs::create_directories(out_dir / dir, ec);
    if (ec) throw Error("io.write", "cannot create '" + (out_dir / dir).string() + "': " + ec.message(), ErrorKind::internal);
  }

  const std::size_t total = config.total();
  std::vector<ShapeRecord> records(total);
  std::vector<char> written(total, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::size_t first_error_id = total;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t id = next.fetch_add(1);
      if (id >= total || failed.load()) return;
      try {
        auto [record, cloud] = make_shape(model, mean_labels, config, master_seed, id);
        save_xyzl(cloud, out_dir / record.file);
        written[id] = 1;
        records[id] = std::move(record);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed = true;
        if (id < first_error_id) {
          first_error_id = id;
          first_error = std::current_exception();
        }
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (first_error) {
    for (std::size_t id = 0; id < total; ++id) {
      if (written[id]) fs::remove(out_dir / records[id].file, ec);
    }
    std::rethrow_exception(first_error);
  }

  DatasetManifest manifest;
  manifest.master_seed = master_seed;
  manifest.config = config;
  manifest.model_vertices = model.vertex_count();
  manifest.model_modes = model.mode_count();
  manifest.complete = true;
  manifest.records = std::move(records);

  save_class_table(mean_labels.class_table(), out_dir / "classes.json");
  write_text_file(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

std::string to_xyzl(const LabeledCloud& cloud) {
  const Points& p = cloud.cloud.points();
  std::string out;
  out.reserve(cloud.cloud.size() * 48);
  char buf[96];
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const int len = std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d\n", p(i, 0), p(i, 1), p(i, 2),
                                  cloud.labels[static_cast<std::size_t>(i)]);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

LabeledCloud parse_xyzl(const std::string& text, const ClassTable& table, std::uint64_t shape_id) {
  std::vector<double> coords;
  std::vector<ClassId> labels;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    double x, y, z;
    long long c;
    std::string extra;
    if (!(row >> x >> y >> z >> c) || (row >> extra)) {
      throw Error("datagen.parse", "line " + std::to_string(line_no) + ": expected 'x y z class_id'");
    }
    coords.insert(coords.end(), {x, y, z});
    labels.push_back(static_cast<ClassId>(c));
  }
  if (labels.empty()) throw Error("datagen.parse", "point file is empty");
  Points pts(static_cast<Eigen::Index>(labels.size()), 3);
  std::copy(coords.begin(), coords.end(), pts.data());
  return {PointCloud(std::move(pts)), LabelMap(std::move(labels), table), shape_id};
}

void save_xyzl(const LabeledCloud& cloud, const std::filesystem::path& path) { write_text_file(path, to_xyzl(cloud)); }

LabeledCloud load_xyzl(const std::filesystem::path& path, const ClassTable& table, std::uint64_t shape_id) {
  try {
    return parse_xyzl(read_text_file(path), table, shape_id);
  } catch (const Error& e) {
    if (e.code() == "io.read") throw;
    throw Error(e.code(), path.string() + ": " + e.what(), e.kind());
  }
}

namespace {

nlohmann::json config_to_json(const DatasetConfig& c) {
  return {{"n_train", c.n_train},
          {"n_val", c.n_val},
          {"n_test", c.n_test},
          {"n_points", c.n_points},
          {"sigma_lo", c.sigma_lo},
          {"sigma_hi", c.sigma_hi},
          {"rotate", {{"train", c.rotate_train}, {"val", c.rotate_val}, {"test", c.rotate_test}}},
          {"downsample", c.downsample == DownsampleMode::fps ? "fps" : "random"},
          {"fps_start", c.fps_start}};
}

DatasetConfig config_from_json(const nlohmann::json& j) {
  DatasetConfig c;
  c.n_train = j.at("n_train").get<std::size_t>();
  c.n_val = j.at("n_val").get<std::size_t>();
  c.n_test = j.at("n_test").get<std::size_t>();
  c.n_points = j.at("n_points").get<std::size_t>();
  c.sigma_lo = j.at("sigma_lo").get<double>();
  c.sigma_hi = j.at("sigma_hi").get<double>();
  c.rotate_train = j.at("rotate").at("train").get<bool>();
  c.rotate_val = j.at("rotate").at("val").get<bool>();
  c.rotate_test = j.at("rotate").at("test").get<bool>();
  c.downsample = j.at("downsample").get<std::string>() == "random" ? DownsampleMode::random : DownsampleMode::fps;
  c.fps_start = j.at("fps_start").get<std::size_t>();
  return c;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& manifest) {
  using nlohmann::json;
  json records = json::array();
  for (const ShapeRecord& r : manifest.records) {
    std::vector<double> rot(9);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) rot[static_cast<std::size_t>(3 * i + j)] = r.rotation(i, j);
    }
    records.push_back({{"id", r.id},
                       {"split", split_name(r.split)},
                       {"file", r.file},
                       {"params", std::vector<double>(r.params.data(), r.params.data() + r.params.size())},
                       {"rotation", rot},
                       {"downsample_indices", r.downsample_indices},
                       {"permutation", r.permutation}});
  }
  json doc = {{"format", "ssmgen-dataset"},
              {"version", kManifestVersion},
              {"complete", manifest.complete},
              {"master_seed", manifest.master_seed},
              {"rng_rule", "per-shape stream: mt19937_64 seeded with splitmix64(splitmix64(master_seed) + shape_id); "
                           "draw order: params, [random downsample], shuffle, [rotation]"},
              {"model", {{"vertices", manifest.model_vertices}, {"modes", manifest.model_modes}}},
              {"config", config_to_json(manifest.config)},
              {"records", records}};
  return doc.dump(1) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "ssmgen-dataset") {
      throw Error("datagen.manifest", "not an ssmgen dataset manifest");
    }
    if (doc.at("version").get<int>() != kManifestVersion) {
      throw Error("datagen.manifest", "unsupported manifest version " + doc.at("version").dump());
    }
    DatasetManifest m;
    m.complete = doc.at("complete").get<bool>();
    m.master_seed = doc.at("master_seed").get<std::uint64_t>();
    m.model_vertices = doc.at("model").at("vertices").get<std::size_t>();
    m.model_modes = doc.at("model").at("modes").get<std::size_t>();
    m.config = config_from_json(doc.at("config"));
    for (const auto& jr : doc.at("records")) {
      ShapeRecord r;
      r.id = jr.at("id").get<std::uint64_t>();
      r.split = parse_split(jr.at("split").get<std::string>());
      r.file = jr.at("file").get<std::string>();
      const auto params = jr.at("params").get<std::vector<double>>();
      r.params = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
      const auto rot = jr.at("rotation").get<std::vector<double>>();
      if (rot.size() != 9) throw Error("datagen.manifest", "rotation must have 9 entries");
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) r.rotation(i, j) = rot[static_cast<std::size_t>(3 * i + j)];
      }
      r.downsample_indices = jr.at("downsample_indices").get<std::vector<std::size_t>>();
      r.permutation = jr.at("permutation").get<std::vector<std::size_t>>();
      m.records.push_back(std::move(r));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("datagen.manifest", std::string("malformed manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const std::filesystem::path& dataset_dir) {
  return manifest_from_json(read_text_file(dataset_dir / "manifest.json"));
}

std::vector<LabeledCloud> load_split(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest,
                                     Split split, const ClassTable& table) {
  std::vector<LabeledCloud> out;
  for (const ShapeRecord* r : manifest.split(split)) out.push_back(load_xyzl(dataset_dir / r->file, table, r->id));
  return out;
}

}  // namespace ssmgen::datagen
