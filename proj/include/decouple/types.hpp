// Copyright 2026 The decouple Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DECOUPLE_TYPES_HPP_
#define DECOUPLE_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace decouple {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error categories surfaced by the library. The C API maps these one-to-one
// onto its status codes.
enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kSingularJacobian,
  kStepSizeRuleInapplicable,
  kEnumerationCapExceeded,
  kNotPotentialGame,
  kDivergence,
  kParse,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace decouple

#endif  // DECOUPLE_TYPES_HPP_
