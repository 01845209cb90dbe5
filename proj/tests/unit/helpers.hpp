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

#include "ssmgen/error.hpp"
#include "ssmgen/mesh.hpp"
#include "ssmgen/random.hpp"

#include <Eigen/Geometry>

#include <doctest.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

namespace testing {

inline ssmgen::Points random_points(std::size_t n, ssmgen::Rng& rng, double scale = 10.0) {
  ssmgen::Points p(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < 3; ++j) p(i, j) = scale * rng.normal();
  }
  return p;
}

inline Eigen::Matrix3d random_rotation(ssmgen::Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q.normalized().toRotationMatrix();
}

inline ssmgen::Points transform(const ssmgen::Points& p, const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  ssmgen::Points out = (p * r.transpose()).rowwise() + t.transpose();
  return out;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ssmgen_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected_code)                 \
  do {                                                        \
    bool thrown_ = false;                                     \
    try {                                                     \
      (void)(expr);                                           \
    } catch (const ssmgen::Error& e_) {                       \
      thrown_ = true;                                         \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what()); \
    }                                                         \
    CHECK_MESSAGE(thrown_, "expected " << (expected_code));  \
  } while (0)
