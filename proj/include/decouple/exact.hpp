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

#ifndef DECOUPLE_EXACT_HPP_
#define DECOUPLE_EXACT_HPP_

#include <vector>

#include <gmpxx.h>

#include "decouple/decoupling.hpp"

// Tolerance-free decoupling verdicts in rational arithmetic. Every double is
// a dyadic rational, so conversion from double input is exact.

namespace decouple {

class RationalMatrix {
 public:
  RationalMatrix(int rows, int cols);

  static RationalMatrix FromDouble(const Matrix& m);
  static RationalMatrix Identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  mpq_class& operator()(int r, int c) { return data_[r * cols_ + c]; }
  const mpq_class& operator()(int r, int c) const { return data_[r * cols_ + c]; }

  RationalMatrix operator*(const RationalMatrix& rhs) const;

  bool BlockIsZero(int row, int col, int rows, int cols) const;
  // Frobenius norm of a block, rounded to double.
  double BlockNorm(int row, int col, int rows, int cols) const;
  double Norm() const { return BlockNorm(0, 0, rows_, cols_); }

 private:
  int rows_;
  int cols_;
  std::vector<mpq_class> data_;
};

// W = I - Gamma J evaluated exactly from the game's entries and step sizes.
RationalMatrix ExactAdjacency(const QuadraticGame& game, const StepSizes& gamma);

// The verdict is true iff every (target, source) block of W^k, 1 <= k < n, is
// exactly zero. Residuals and normalizers are reported rounded to double; the
// tolerance field of the query is carried but not used.
DecouplingReport CheckExact(const RationalMatrix& adjacency, const PlayerDims& dims,
                            const DecouplingQuery& query);

std::vector<DecouplingReport> AllPairsExact(const RationalMatrix& adjacency,
                                            const PlayerDims& dims);

}  // namespace decouple

#endif  // DECOUPLE_EXACT_HPP_
