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

#include "decouple/bilinear.hpp"

#include <cmath>
#include <string>

namespace decouple {

namespace {

constexpr double kZeroTol = 1e-12;

void CheckSide(int side) {
  if (side != 1 && side != 2) {
    throw Error(ErrorCode::kInvalidArgument, "side must be 1 or 2");
  }
}

void CheckCoordinate(int index, int dim, const char* what) {
  if (index < 0 || index >= dim) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " coordinate " + std::to_string(index) +
                    " out of range [0, " + std::to_string(dim) + ")");
  }
}

}  // namespace

void BilinearGameSpec::Validate() const {
  const auto n1 = payoff_first.rows();
  const auto n2 = payoff_first.cols();
  if (n1 < 1 || n2 < 1) {
    throw Error(ErrorCode::kInvalidArgument, "payoff matrices must be nonempty");
  }
  if (payoff_second.rows() != n2 || payoff_second.cols() != n1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "B is " + std::to_string(payoff_second.rows()) + "x" +
                    std::to_string(payoff_second.cols()) + ", expected " +
                    std::to_string(n2) + "x" + std::to_string(n1));
  }
  if (!payoff_first.allFinite() || !payoff_second.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "payoff matrices must be finite");
  }
  if (!std::isfinite(gamma1) || !std::isfinite(gamma2) || gamma1 < 0.0 ||
      gamma2 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "step sizes must be finite and >= 0");
  }
}

Matrix BilinearAdjacency(const BilinearGameSpec& spec) {
  spec.Validate();
  const int n1 = spec.first_dim();
  const int n2 = spec.second_dim();
  Matrix w = Matrix::Identity(n1 + n2, n1 + n2);
  w.topRightCorner(n1, n2) = -spec.gamma1 * spec.payoff_first;
  w.bottomLeftCorner(n2, n1) = -spec.gamma2 * spec.payoff_second;
  if (spec.mode == PlayMode::kAlternating) {
    w.bottomRightCorner(n2, n2) +=
        spec.gamma1 * spec.gamma2 * (spec.payoff_second * spec.payoff_first);
  }
  return w;
}

GameGraph BuildBilinearGraph(const BilinearGameSpec& spec) {
  const int n1 = spec.first_dim();
  const int n2 = spec.second_dim();
  Matrix w = BilinearAdjacency(spec);
  std::vector<double> gammas(n1, spec.gamma1);
  gammas.insert(gammas.end(), n2, spec.gamma2);
  return GameGraph(PlayerDims::Scalar(n1 + n2), std::move(w),
                   StepSizes(std::move(gammas)), Vector::Zero(n1 + n2));
}

QuadraticGame BilinearCoordinateGame(const BilinearGameSpec& spec) {
  spec.Validate();
  const int n1 = spec.first_dim();
  const int n2 = spec.second_dim();
  Matrix jac = Matrix::Zero(n1 + n2, n1 + n2);
  jac.topRightCorner(n1, n2) = spec.payoff_first;
  jac.bottomLeftCorner(n2, n1) = spec.payoff_second;
  if (spec.mode == PlayMode::kAlternating) {
    jac.bottomRightCorner(n2, n2) =
        -spec.gamma1 * (spec.payoff_second * spec.payoff_first);
  }
  QuadraticGame game(PlayerDims::Scalar(n1 + n2));
  for (int r = 0; r < n1 + n2; ++r) {
    for (int c = 0; c < n1 + n2; ++c) {
      Matrix entry(1, 1);
      entry(0, 0) = jac(r, c);
      if (r == c) {
        game.SetSelf(r, entry);
      } else {
        game.SetCross(r, c, entry);
      }
    }
  }
  return game;
}

int CoordinateNode(const BilinearGameSpec& spec, int side, int index) {
  CheckSide(side);
  if (side == 1) {
    CheckCoordinate(index, spec.first_dim(), "side-1");
    return index;
  }
  CheckCoordinate(index, spec.second_dim(), "side-2");
  return spec.first_dim() + index;
}

void BilinearStep(const BilinearGameSpec& spec, Vector& x1, Vector& x2) {
  const Vector next1 = x1 - spec.gamma1 * (spec.payoff_first * x2);
  const Vector& seen = spec.mode == PlayMode::kAlternating ? next1 : x1;
  x2 = x2 - spec.gamma2 * (spec.payoff_second * seen);
  x1 = next1;
}

SameSideCheck SameSideCondition(const BilinearGameSpec& spec, int side, int i, int j) {
  spec.Validate();
  CheckSide(side);
  const Matrix& a = spec.payoff_first;
  const Matrix& b = spec.payoff_second;
  const int dim = side == 1 ? spec.first_dim() : spec.second_dim();
  CheckCoordinate(i, dim, "source");
  CheckCoordinate(j, dim, "target");
  if (i == j) {
    throw Error(ErrorCode::kInvalidArgument, "coordinates must differ");
  }
  SameSideCheck check;
  if (side == 1) {
    for (int l = 0; l < spec.second_dim(); ++l) check.value += b(l, i) * a(j, l);
  } else {
    for (int l = 0; l < spec.first_dim(); ++l) check.value += b(j, l) * a(l, i);
  }
  check.holds = std::abs(check.value) <= kZeroTol;
  return check;
}

CrossSideCheck CrossSideCondition(const BilinearGameSpec& spec, int from_side, int i,
                                  int j) {
  spec.Validate();
  CheckSide(from_side);
  const Matrix& a = spec.payoff_first;
  const Matrix& b = spec.payoff_second;
  const int n1 = spec.first_dim();
  const int n2 = spec.second_dim();
  CrossSideCheck check;
  if (from_side == 1) {
    CheckCoordinate(i, n1, "source");
    CheckCoordinate(j, n2, "target");
    check.direct = b(j, i);
    for (int q = 0; q < n2; ++q) {
      double inner = 0.0;
      for (int l = 0; l < n1; ++l) inner += a(l, q) * b(j, l);
      check.second_order += b(q, i) * inner;
    }
  } else {
    CheckCoordinate(i, n2, "source");
    CheckCoordinate(j, n1, "target");
    check.direct = a(j, i);
    for (int q = 0; q < n1; ++q) {
      double inner = 0.0;
      for (int l = 0; l < n2; ++l) inner += b(l, q) * a(j, l);
      check.second_order += a(q, i) * inner;
    }
  }
  check.holds =
      std::abs(check.direct) <= kZeroTol && std::abs(check.second_order) <= kZeroTol;
  return check;
}

}  // namespace decouple
