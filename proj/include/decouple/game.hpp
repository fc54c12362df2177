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

#ifndef DECOUPLE_GAME_HPP_
#define DECOUPLE_GAME_HPP_

#include <vector>

#include "decouple/types.hpp"

// Quadratic games, their gradient-play game graphs, Nash equilibria and the
// uniform step-size rule.
//
// Players are indexed from 0 throughout the C++ API. The joint action space
// R^n is the product R^{n_0} x ... x R^{n_{N-1}}; every player owns one
// contiguous block of coordinates.

namespace decouple {

class PlayerDims {
 public:
  // Throws kInvalidArgument unless dims is nonempty and all entries are >= 1.
  explicit PlayerDims(std::vector<int> dims);

  int num_players() const { return static_cast<int>(dims_.size()); }
  int dim(int player) const;
  int offset(int player) const;
  int total() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }

  // All-ones dims: every coordinate is its own player.
  static PlayerDims Scalar(int num_players);

  bool operator==(const PlayerDims& other) const { return dims_ == other.dims_; }

 private:
  void CheckPlayer(int player) const;

  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

class StepSizes {
 public:
  // Throws kInvalidArgument unless every entry is finite and positive.
  explicit StepSizes(std::vector<double> gammas);

  static StepSizes Uniform(int num_players, double gamma);

  int num_players() const { return static_cast<int>(gammas_.size()); }
  double gamma(int player) const { return gammas_.at(player); }
  const std::vector<double>& values() const { return gammas_; }

  // Diagonal of Gamma = blkdiag(gamma_1 I_{n_1}, ..., gamma_N I_{n_N}).
  Vector Expand(const PlayerDims& dims) const;

 private:
  std::vector<double> gammas_;
};

// f_i(x) = 1/2 x_i^T P_i x_i + x_i^T (sum_{j != i} P_ij x_j + r_i).
//
// Cross blocks that are never set are zero. P_i symmetry is not enforced; the
// gradient block is taken as P_i x_i as written, so callers that care should
// consult AsymmetricSelfBlocks().
class QuadraticGame {
 public:
  explicit QuadraticGame(PlayerDims dims);

  const PlayerDims& dims() const { return dims_; }
  int num_players() const { return dims_.num_players(); }

  void SetSelf(int player, const Matrix& block);
  void SetCross(int player, int other, const Matrix& block);
  void SetOffset(int player, const Vector& r);

  const Matrix& Self(int player) const;
  const Matrix& Cross(int player, int other) const;
  const Vector& Offset(int player) const;

  // Stack of r_i.
  Vector StackedOffset() const;

  double Cost(int player, const Vector& x) const;
  // D_i f_i(x) = P_i x_i + sum_{j != i} P_ij x_j + r_i.
  Vector Gradient(int player, const Vector& x) const;

  // Players whose P_i differs from P_i^T by more than tol (Frobenius,
  // relative to max(1, ||P_i||)).
  std::vector<int> AsymmetricSelfBlocks(double tol = 1e-12) const;

 private:
  void CheckPlayer(int player) const;
  void CheckFinite(const Matrix& m, const char* what) const;

  PlayerDims dims_;
  std::vector<Matrix> self_;
  std::vector<Matrix> cross_;  // row-major N x N grid, diagonal unused
  std::vector<Vector> offset_;
};

// Adjacency matrix of the game graph together with the step sizes and the
// constant term Gamma r_bar of x^{k+1} = W x^k - Gamma r_bar.
class GameGraph {
 public:
  // Throws kDimensionMismatch when W is not n x n, gamma does not have one
  // entry per player, or offset is not length n.
  GameGraph(PlayerDims dims, Matrix adjacency, StepSizes gamma, Vector offset);

  const PlayerDims& dims() const { return dims_; }
  int num_players() const { return dims_.num_players(); }
  int total_dim() const { return dims_.total(); }
  const Matrix& adjacency() const { return adjacency_; }
  const StepSizes& gamma() const { return gamma_; }
  const Vector& offset() const { return offset_; }

  // Block (i, j), shape n_i x n_j: the weight of edge j -> i.
  Matrix Block(int row_player, int col_player) const;

  // Edge j -> i exists when some entry of block (i, j) exceeds zero_tol in
  // magnitude. Self loops always exist.
  bool HasEdge(int from_player, int to_player, double zero_tol = 0.0) const;

 private:
  PlayerDims dims_;
  Matrix adjacency_;
  StepSizes gamma_;
  Vector offset_;
};

// W_ii = I - gamma_i P_i, W_ij = -gamma_i P_ij, offset = Gamma r_bar.
GameGraph BuildGameGraph(const QuadraticGame& game, const StepSizes& gamma);

// Step-size-free block matrix J with J_ii = P_i and J_ij = P_ij, so that
// BuildGameGraph(game, gamma).adjacency() == I - Gamma J.
Matrix GameJacobian(const QuadraticGame& game);

// The quadratic game whose graph under `gamma` is exactly `graph`:
// P_i = (I - W_ii) / gamma_i, P_ij = -W_ij / gamma_i, r = Gamma^{-1} offset.
QuadraticGame GameFromGraph(const GameGraph& graph);

struct NashResult {
  Vector action;
  double reciprocal_condition = 0.0;
};

// Reciprocal 2-norm condition numbers below this are treated as singular.
inline constexpr double kSingularRcond = 1e-12;

// Solves J x = -r_bar. Throws Error(kSingularJacobian) with the conditioning
// diagnostic in the message when rcond(J) < kSingularRcond.
NashResult NashEquilibrium(const QuadraticGame& game);

struct StepSizeRule {
  double gamma = 0.0;
  double alpha = 0.0;  // lambda_min(1/4 (J + J^T)^T (J + J^T))
  double beta = 0.0;   // lambda_max(J^T J)
};

// gamma = sqrt(alpha) / beta. Takes the step-size-free Jacobian. Throws
// kStepSizeRuleInapplicable when alpha is not positive.
StepSizeRule UniformStepSize(const Matrix& jacobian);

}  // namespace decouple

#endif  // DECOUPLE_GAME_HPP_
