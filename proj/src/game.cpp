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

#include "decouple/game.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace decouple {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kDimensionMismatch:
      return "dimension mismatch";
    case ErrorCode::kSingularJacobian:
      return "singular jacobian";
    case ErrorCode::kStepSizeRuleInapplicable:
      return "step-size rule inapplicable";
    case ErrorCode::kEnumerationCapExceeded:
      return "enumeration cap exceeded";
    case ErrorCode::kNotPotentialGame:
      return "not a potential game";
    case ErrorCode::kDivergence:
      return "divergence";
    case ErrorCode::kParse:
      return "parse error";
    case ErrorCode::kIo:
      return "i/o error";
  }
  return "unknown";
}

namespace {

std::string Shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// PlayerDims

PlayerDims::PlayerDims(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a game needs at least one player");
  }
  offsets_.reserve(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "player " + std::to_string(i) + " has dimension " +
                      std::to_string(dims_[i]) + " (must be >= 1)");
    }
    offsets_.push_back(total_);
    total_ += dims_[i];
  }
}

PlayerDims PlayerDims::Scalar(int num_players) {
  return PlayerDims(std::vector<int>(static_cast<std::size_t>(num_players), 1));
}

void PlayerDims::CheckPlayer(int player) const {
  if (player < 0 || player >= num_players()) {
    throw Error(ErrorCode::kInvalidArgument,
                "player index " + std::to_string(player) + " out of range [0, " +
                    std::to_string(num_players()) + ")");
  }
}

int PlayerDims::dim(int player) const {
  CheckPlayer(player);
  return dims_[player];
}

int PlayerDims::offset(int player) const {
  CheckPlayer(player);
  return offsets_[player];
}

// ---------------------------------------------------------------------------
// StepSizes

StepSizes::StepSizes(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  for (std::size_t i = 0; i < gammas_.size(); ++i) {
    if (!std::isfinite(gammas_[i]) || gammas_[i] <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "step size of player " + std::to_string(i) +
                      " must be positive and finite");
    }
  }
}

StepSizes StepSizes::Uniform(int num_players, double gamma) {
  return StepSizes(std::vector<double>(static_cast<std::size_t>(num_players), gamma));
}

Vector StepSizes::Expand(const PlayerDims& dims) const {
  if (dims.num_players() != num_players()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "step sizes given for " + std::to_string(num_players()) +
                    " players, game has " + std::to_string(dims.num_players()));
  }
  Vector diag(dims.total());
  for (int i = 0; i < num_players(); ++i) {
    diag.segment(dims.offset(i), dims.dim(i)).setConstant(gammas_[i]);
  }
  return diag;
}

// ---------------------------------------------------------------------------
// QuadraticGame

QuadraticGame::QuadraticGame(PlayerDims dims) : dims_(std::move(dims)) {
  const int n = dims_.num_players();
  self_.reserve(n);
  offset_.reserve(n);
  cross_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    self_.push_back(Matrix::Zero(dims_.dim(i), dims_.dim(i)));
    offset_.push_back(Vector::Zero(dims_.dim(i)));
    for (int j = 0; j < n; ++j) {
      if (i != j) cross_[i * n + j] = Matrix::Zero(dims_.dim(i), dims_.dim(j));
    }
  }
}

void QuadraticGame::CheckPlayer(int player) const {
  if (player < 0 || player >= num_players()) {
    throw Error(ErrorCode::kInvalidArgument,
                "player index " + std::to_string(player) + " out of range");
  }
}

void QuadraticGame::CheckFinite(const Matrix& m, const char* what) const {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " has non-finite entries");
  }
}

void QuadraticGame::SetSelf(int player, const Matrix& block) {
  CheckPlayer(player);
  const int ni = dims_.dim(player);
  if (block.rows() != ni || block.cols() != ni) {
    throw Error(ErrorCode::kDimensionMismatch,
                "P_" + std::to_string(player) + " is " + Shape(block) +
                    ", expected " + std::to_string(ni) + "x" + std::to_string(ni));
  }
  CheckFinite(block, "self block");
  self_[player] = block;
}

void QuadraticGame::SetCross(int player, int other, const Matrix& block) {
  CheckPlayer(player);
  CheckPlayer(other);
  if (player == other) {
    throw Error(ErrorCode::kInvalidArgument,
                "cross block needs two distinct players; use SetSelf");
  }
  const int ni = dims_.dim(player);
  const int nj = dims_.dim(other);
  if (block.rows() != ni || block.cols() != nj) {
    throw Error(ErrorCode::kDimensionMismatch,
                "P_" + std::to_string(player) + "," + std::to_string(other) +
                    " is " + Shape(block) + ", expected " + std::to_string(ni) +
                    "x" + std::to_string(nj));
  }
  CheckFinite(block, "cross block");
  cross_[player * num_players() + other] = block;
}

void QuadraticGame::SetOffset(int player, const Vector& r) {
  CheckPlayer(player);
  if (r.size() != dims_.dim(player)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "r_" + std::to_string(player) + " has length " +
                    std::to_string(r.size()) + ", expected " +
                    std::to_string(dims_.dim(player)));
  }
  CheckFinite(r, "offset");
  offset_[player] = r;
}

const Matrix& QuadraticGame::Self(int player) const {
  CheckPlayer(player);
  return self_[player];
}

const Matrix& QuadraticGame::Cross(int player, int other) const {
  CheckPlayer(player);
  CheckPlayer(other);
  if (player == other) {
    throw Error(ErrorCode::kInvalidArgument, "no cross block for a single player");
  }
  return cross_[player * num_players() + other];
}

const Vector& QuadraticGame::Offset(int player) const {
  CheckPlayer(player);
  return offset_[player];
}

Vector QuadraticGame::StackedOffset() const {
  Vector r(dims_.total());
  for (int i = 0; i < num_players(); ++i) {
    r.segment(dims_.offset(i), dims_.dim(i)) = offset_[i];
  }
  return r;
}

double QuadraticGame::Cost(int player, const Vector& x) const {
  CheckPlayer(player);
  if (x.size() != dims_.total()) {
    throw Error(ErrorCode::kDimensionMismatch, "joint action has wrong length");
  }
  const auto xi = x.segment(dims_.offset(player), dims_.dim(player));
  Vector linear = offset_[player];
  for (int j = 0; j < num_players(); ++j) {
    if (j == player) continue;
    linear += Cross(player, j) * x.segment(dims_.offset(j), dims_.dim(j));
  }
  return 0.5 * xi.dot(self_[player] * xi) + xi.dot(linear);
}

Vector QuadraticGame::Gradient(int player, const Vector& x) const {
  CheckPlayer(player);
  if (x.size() != dims_.total()) {
    throw Error(ErrorCode::kDimensionMismatch, "joint action has wrong length");
  }
  Vector g = self_[player] * x.segment(dims_.offset(player), dims_.dim(player)) +
             offset_[player];
  for (int j = 0; j < num_players(); ++j) {
    if (j == player) continue;
    g += Cross(player, j) * x.segment(dims_.offset(j), dims_.dim(j));
  }
  return g;
}

std::vector<int> QuadraticGame::AsymmetricSelfBlocks(double tol) const {
  std::vector<int> out;
  for (int i = 0; i < num_players(); ++i) {
    const double scale = std::max(1.0, self_[i].norm());
    if ((self_[i] - self_[i].transpose()).norm() > tol * scale) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GameGraph

GameGraph::GameGraph(PlayerDims dims, Matrix adjacency, StepSizes gamma,
                     Vector offset)
    : dims_(std::move(dims)),
      adjacency_(std::move(adjacency)),
      gamma_(std::move(gamma)),
      offset_(std::move(offset)) {
  const int n = dims_.total();
  if (adjacency_.rows() != n || adjacency_.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "adjacency is " + Shape(adjacency_) + ", expected " +
                    std::to_string(n) + "x" + std::to_string(n));
  }
  if (gamma_.num_players() != dims_.num_players()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "step sizes given for " + std::to_string(gamma_.num_players()) +
                    " players, graph has " + std::to_string(dims_.num_players()));
  }
  if (offset_.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "offset has length " + std::to_string(offset_.size()) +
                    ", expected " + std::to_string(n));
  }
  if (!adjacency_.allFinite() || !offset_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "game graph has non-finite entries");
  }
}

Matrix GameGraph::Block(int row_player, int col_player) const {
  return adjacency_.block(dims_.offset(row_player), dims_.offset(col_player),
                          dims_.dim(row_player), dims_.dim(col_player));
}

bool GameGraph::HasEdge(int from_player, int to_player, double zero_tol) const {
  if (from_player == to_player) {
    dims_.dim(from_player);  // range check
    return true;
  }
  const auto block =
      adjacency_.block(dims_.offset(to_player), dims_.offset(from_player),
                       dims_.dim(to_player), dims_.dim(from_player));
  return block.cwiseAbs().maxCoeff() > zero_tol;
}

// ---------------------------------------------------------------------------
// Free functions

Matrix GameJacobian(const QuadraticGame& game) {
  const PlayerDims& dims = game.dims();
  Matrix jac(dims.total(), dims.total());
  for (int i = 0; i < game.num_players(); ++i) {
    for (int j = 0; j < game.num_players(); ++j) {
      jac.block(dims.offset(i), dims.offset(j), dims.dim(i), dims.dim(j)) =
          i == j ? game.Self(i) : game.Cross(i, j);
    }
  }
  return jac;
}

GameGraph BuildGameGraph(const QuadraticGame& game, const StepSizes& gamma) {
  const PlayerDims& dims = game.dims();
  const Vector diag = gamma.Expand(dims);
  // Block rows scale by gamma_i, which is exactly diag(Gamma) applied row-wise.
  Matrix adjacency = -(diag.asDiagonal() * GameJacobian(game));
  adjacency.diagonal().array() += 1.0;
  Vector offset = diag.cwiseProduct(game.StackedOffset());
  return GameGraph(dims, std::move(adjacency), gamma, std::move(offset));
}

QuadraticGame GameFromGraph(const GameGraph& graph) {
  const PlayerDims& dims = graph.dims();
  QuadraticGame game(dims);
  for (int i = 0; i < dims.num_players(); ++i) {
    const double g = graph.gamma().gamma(i);
    const int ni = dims.dim(i);
    game.SetSelf(i, (Matrix::Identity(ni, ni) - graph.Block(i, i)) / g);
    for (int j = 0; j < dims.num_players(); ++j) {
      if (j != i) game.SetCross(i, j, -graph.Block(i, j) / g);
    }
    game.SetOffset(i, graph.offset().segment(dims.offset(i), ni) / g);
  }
  return game;
}

NashResult NashEquilibrium(const QuadraticGame& game) {
  const Matrix jac = GameJacobian(game);
  Eigen::BDCSVD<Matrix> svd(jac);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double rcond = smax > 0.0 ? sv(sv.size() - 1) / smax : 0.0;
  if (!(rcond >= kSingularRcond)) {
    std::ostringstream os;
    os.precision(3);
    os << "game jacobian is singular to working precision (rcond = " << rcond
       << " < " << kSingularRcond << ")";
    throw Error(ErrorCode::kSingularJacobian, os.str());
  }
  NashResult result;
  result.action = jac.partialPivLu().solve(-game.StackedOffset());
  result.reciprocal_condition = rcond;
  return result;
}

StepSizeRule UniformStepSize(const Matrix& jacobian) {
  if (jacobian.rows() != jacobian.cols() || jacobian.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "jacobian must be square and nonempty");
  }
  const Matrix sym = jacobian + jacobian.transpose();
  const Matrix lower = 0.25 * (sym.transpose() * sym);
  const Matrix upper = jacobian.transpose() * jacobian;
  Eigen::SelfAdjointEigenSolver<Matrix> lower_eig(lower, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> upper_eig(upper, Eigen::EigenvaluesOnly);
  StepSizeRule rule;
  rule.alpha = lower_eig.eigenvalues()(0);
  rule.beta = upper_eig.eigenvalues()(upper.rows() - 1);
  // Both matrices are PSD; an alpha at round-off level of beta is zero.
  const double floor = std::numeric_limits<double>::epsilon() *
                       static_cast<double>(jacobian.rows()) * rule.beta;
  if (!(rule.beta > 0.0) || !(rule.alpha > floor)) {
    std::ostringstream os;
    os << "step-size rule inapplicable: alpha = " << rule.alpha
       << " is not positive (symmetric part of the jacobian is singular)";
    throw Error(ErrorCode::kStepSizeRuleInapplicable, os.str());
  }
  rule.gamma = std::sqrt(rule.alpha) / rule.beta;
  return rule;
}

}  // namespace decouple
