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

#include "decouple/exact.hpp"

#include <cmath>
#include <string>

namespace decouple {

RationalMatrix::RationalMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

RationalMatrix RationalMatrix::FromDouble(const Matrix& m) {
  RationalMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < out.rows_; ++r) {
    for (int c = 0; c < out.cols_; ++c) {
      if (!std::isfinite(m(r, c))) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite entry in exact mode");
      }
      out(r, c) = mpq_class(m(r, c));
    }
  }
  return out;
}

RationalMatrix RationalMatrix::Identity(int n) {
  RationalMatrix out(n, n);
  for (int i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& rhs) const {
  if (cols_ != rhs.rows_) {
    throw Error(ErrorCode::kDimensionMismatch, "rational product shape mismatch");
  }
  RationalMatrix out(rows_, rhs.cols_);
  mpq_class term;
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) {
      const mpq_class& a = (*this)(r, k);
      if (sgn(a) == 0) continue;
      for (int c = 0; c < rhs.cols_; ++c) {
        const mpq_class& b = rhs(k, c);
        if (sgn(b) == 0) continue;
        term = a * b;
        out(r, c) += term;
      }
    }
  }
  return out;
}

bool RationalMatrix::BlockIsZero(int row, int col, int rows, int cols) const {
  for (int r = row; r < row + rows; ++r) {
    for (int c = col; c < col + cols; ++c) {
      if (sgn((*this)(r, c)) != 0) return false;
    }
  }
  return true;
}

double RationalMatrix::BlockNorm(int row, int col, int rows, int cols) const {
  double sum = 0.0;
  for (int r = row; r < row + rows; ++r) {
    for (int c = col; c < col + cols; ++c) {
      const double v = (*this)(r, c).get_d();
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

RationalMatrix ExactAdjacency(const QuadraticGame& game, const StepSizes& gamma) {
  const PlayerDims& dims = game.dims();
  const Matrix jac = GameJacobian(game);
  const Vector diag = gamma.Expand(dims);
  const int n = dims.total();
  RationalMatrix w = RationalMatrix::Identity(n);
  for (int r = 0; r < n; ++r) {
    const mpq_class g(diag(r));
    for (int c = 0; c < n; ++c) {
      if (jac(r, c) != 0.0) w(r, c) -= g * mpq_class(jac(r, c));
    }
  }
  return w;
}

namespace {

void CheckShape(const RationalMatrix& adjacency, const PlayerDims& dims) {
  if (adjacency.rows() != dims.total() || adjacency.cols() != dims.total()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "adjacency does not match the total action dimension " +
                    std::to_string(dims.total()));
  }
}

void CheckPair(const PlayerDims& dims, const DecouplingQuery& query) {
  const int n = dims.num_players();
  if (query.source < 0 || query.source >= n || query.target < 0 || query.target >= n) {
    throw Error(ErrorCode::kInvalidArgument, "pair out of range");
  }
  if (query.source == query.target) {
    throw Error(ErrorCode::kInvalidArgument,
                "source and target coincide; a player always sees its own "
                "disturbance");
  }
}

}  // namespace

std::vector<DecouplingReport> AllPairsExact(const RationalMatrix& adjacency,
                                            const PlayerDims& dims) {
  CheckShape(adjacency, dims);
  const int players = dims.num_players();
  std::vector<DecouplingReport> reports;
  for (int i = 0; i < players; ++i) {
    for (int j = 0; j < players; ++j) {
      if (i == j) continue;
      DecouplingReport report;
      report.query = {i, j, 0.0};
      report.method = Method::kExact;
      report.decoupled = true;
      reports.push_back(std::move(report));
    }
  }
  RationalMatrix power = adjacency;
  for (int k = 1; k < dims.total(); ++k) {
    if (k > 1) power = adjacency * power;
    const double normalizer = power.Norm();
    for (DecouplingReport& report : reports) {
      const int i = report.query.source;
      const int j = report.query.target;
      const int r0 = dims.offset(j), c0 = dims.offset(i);
      const int nr = dims.dim(j), nc = dims.dim(i);
      report.residuals.push_back(power.BlockNorm(r0, c0, nr, nc));
      report.normalizers.push_back(normalizer);
      if (!power.BlockIsZero(r0, c0, nr, nc)) report.decoupled = false;
    }
  }
  return reports;
}

DecouplingReport CheckExact(const RationalMatrix& adjacency, const PlayerDims& dims,
                            const DecouplingQuery& query) {
  CheckShape(adjacency, dims);
  CheckPair(dims, query);
  DecouplingReport report;
  // The zero test is exact, so the reported tolerance is 0.
  report.query = {query.source, query.target, 0.0};
  report.method = Method::kExact;
  report.decoupled = true;
  const int r0 = dims.offset(query.target), c0 = dims.offset(query.source);
  const int nr = dims.dim(query.target), nc = dims.dim(query.source);
  RationalMatrix power = adjacency;
  for (int k = 1; k < dims.total(); ++k) {
    if (k > 1) power = adjacency * power;
    report.residuals.push_back(power.BlockNorm(r0, c0, nr, nc));
    report.normalizers.push_back(power.Norm());
    if (!power.BlockIsZero(r0, c0, nr, nc)) report.decoupled = false;
  }
  return report;
}

}  // namespace decouple
