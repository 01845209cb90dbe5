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

#include <stdexcept>
#include <string>

namespace ssmgen {

/// Broad failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorKind {
  usage = 1,     ///< bad arguments or configuration
  data = 2,      ///< input data violates a format or invariant
  internal = 3,  ///< I/O failure or numerical breakdown
};

/// Exception carrying a module-qualified code such as "mesh.parse" or
/// "eval.missing_prediction".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, ErrorKind kind = ErrorKind::data)
      : std::runtime_error(message), code_(std::move(code)), kind_(kind) {}

  const std::string& code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string code_;
  ErrorKind kind_;
};

}  // namespace ssmgen
