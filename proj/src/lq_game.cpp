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

#include "decouple/lq_game.hpp"

#include <algorithm>
#include <string>

namespace decouple {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPdFloor = 1e-12;
constexpr double kRankTol = 1e-9;
constexpr double kConditionTol = 1e-9;

std::string PlayerTag(const char* name, int i) {
  return std::string(name) + "_" + std::to_string(i);
}

void RequireShape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                  const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                name + " is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                    "x" + std::to_string(cols));
  }
}

int InputDim(const LQGameSpec& spec, int i) {
  return static_cast<int>(spec.inputs[i].cols());
}

// Orthonormal basis of range(m), rank decided at kRankTol * sigma_max.
Matrix RangeBasis(const Matrix& m) {
  if (m.size() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0) {
    while (rank < sv.size() && sv(rank) > kRankTol * smax) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of ker(m).
Matrix KernelBasis(const Matrix& m) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0) {
    while (rank < sv.size() && sv(rank) > kRankTol * smax) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace

void LQGameSpec::Validate() const {
  const int m = state_dim();
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "state dimension must be >= 1");
  RequireShape(dynamics, m, m, "A");
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon T must be >= 1");
  }
  const int n = num_players();
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "an LQ game needs players");
  if (static_cast<int>(state_costs.size()) != n ||
      static_cast<int>(input_costs.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "B, Q and R must list one matrix per player");
  }
  if (!targets.empty() && static_cast<int>(targets.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "targets must list one point per player");
  }
  if (initial_state.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "z0 has length " + std::to_string(initial_state.size()) +
                    ", expected " + std::to_string(m));
  }
  if (!dynamics.allFinite() || !initial_state.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "A and z0 must be finite");
  }
  for (int i = 0; i < n; ++i) {
    if (inputs[i].rows() != m || inputs[i].cols() < 1) {
      throw Error(ErrorCode::kDimensionMismatch,
                  PlayerTag("B", i) + " must have " + std::to_string(m) +
                      " rows and at least one column");
    }
    RequireShape(state_costs[i], m, m, PlayerTag("Q", i));
    const int mi = InputDim(*this, i);
    RequireShape(input_costs[i], mi, mi, PlayerTag("R", i));
    if (!inputs[i].allFinite() || !state_costs[i].allFinite() ||
        !input_costs[i].allFinite()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "player " + std::to_string(i) + " has non-finite cost or input data");
    }
    const Matrix& q = state_costs[i];
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
      throw Error(ErrorCode::kInvalidArgument, PlayerTag("Q", i) + " is not symmetric");
    }
    const Matrix& r = input_costs[i];
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol ||
        r.llt().info() != Eigen::Success) {
      throw Error(ErrorCode::kInvalidArgument,
                  PlayerTag("R", i) + " is not symmetric positive definite");
    }
    if (!targets.empty()) {
      if (targets[i].size() != m) {
        throw Error(ErrorCode::kDimensionMismatch,
                    PlayerTag("c", i) + " must have length " + std::to_string(m));
      }
      if (!targets[i].allFinite()) {
        throw Error(ErrorCode::kInvalidArgument, "targets must be finite");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Lifting

LiftedLQGame Lift(const LQGameSpec& spec) {
  spec.Validate();
  const int m = spec.state_dim();
  const int horizon = spec.horizon;
  const int n = spec.num_players();
  const int rows = (horizon + 1) * m;

  // powers[p] = A^p for p = 0 .. T.
  std::vector<Matrix> powers;
  powers.reserve(horizon + 1);
  powers.push_back(Matrix::Identity(m, m));
  for (int p = 1; p <= horizon; ++p) powers.push_back(spec.dynamics * powers.back());

  Matrix free_response(rows, m);
  for (int t = 0; t <= horizon; ++t) free_response.middleRows(t * m, m) = powers[t];

  std::vector<int> dims;
  std::vector<Matrix> control_maps;
  std::vector<Matrix> qbars;
  std::vector<Matrix> rbars;
  std::vector<Vector> lifted_targets;
  for (int i = 0; i < n; ++i) {
    const int mi = InputDim(spec, i);
    dims.push_back(horizon * mi);
    Matrix g = Matrix::Zero(rows, horizon * mi);
    for (int t = 1; t <= horizon; ++t) {
      for (int s = 0; s < t; ++s) {
        g.block(t * m, s * mi, m, mi) = powers[t - 1 - s] * spec.inputs[i];
      }
    }
    control_maps.push_back(std::move(g));

    Matrix qbar = Matrix::Zero(rows, rows);
    for (int t = 0; t <= horizon; ++t) qbar.block(t * m, t * m, m, m) = spec.state_costs[i];
    qbars.push_back(std::move(qbar));

    Matrix rbar = Matrix::Zero(horizon * mi, horizon * mi);
    for (int t = 0; t < horizon; ++t) {
      rbar.block(t * mi, t * mi, mi, mi) = spec.input_costs[i];
    }
    rbars.push_back(std::move(rbar));

    Vector c = Vector::Zero(rows);
    if (!spec.targets.empty()) {
      for (int t = 0; t <= horizon; ++t) c.segment(t * m, m) = spec.targets[i];
    }
    lifted_targets.push_back(std::move(c));
  }

  QuadraticGame game{PlayerDims(dims)};
  const Vector hz0 = free_response * spec.initial_state;
  for (int i = 0; i < n; ++i) {
    const Matrix gtq = control_maps[i].transpose() * qbars[i];
    game.SetSelf(i, gtq * control_maps[i] + rbars[i]);
    for (int j = 0; j < n; ++j) {
      if (j != i) game.SetCross(i, j, gtq * control_maps[j]);
    }
    game.SetOffset(i, gtq * (hz0 - lifted_targets[i]));
  }

  return LiftedLQGame{std::move(control_maps), std::move(free_response),
                      std::move(qbars),        std::move(rbars),
                      std::move(lifted_targets), spec.initial_state,
                      std::move(game)};
}

Vector LiftedLQGame::States(const Vector& joint_action) const {
  const PlayerDims& dims = game.dims();
  if (joint_action.size() != dims.total()) {
    throw Error(ErrorCode::kDimensionMismatch, "joint action has wrong length");
  }
  Vector z = free_response * initial_state;
  for (int i = 0; i < dims.num_players(); ++i) {
    z += control_maps[i] * joint_action.segment(dims.offset(i), dims.dim(i));
  }
  return z;
}

double LiftedLQGame::Cost(int player, const Vector& joint_action) const {
  const PlayerDims& dims = game.dims();
  const Vector err = States(joint_action) - lifted_targets.at(player);
  const auto u = joint_action.segment(dims.offset(player), dims.dim(player));
  return 0.5 * err.dot(lifted_state_costs[player] * err) +
         0.5 * u.dot(lifted_input_costs[player] * u);
}

Vector SimulateDynamics(const LQGameSpec& spec, const Vector& joint_action) {
  spec.Validate();
  const int m = spec.state_dim();
  const int horizon = spec.horizon;
  int total = 0;
  for (int i = 0; i < spec.num_players(); ++i) total += horizon * InputDim(spec, i);
  if (joint_action.size() != total) {
    throw Error(ErrorCode::kDimensionMismatch, "joint action has wrong length");
  }
  Vector z((horizon + 1) * m);
  Vector state = spec.initial_state;
  z.segment(0, m) = state;
  for (int t = 0; t < horizon; ++t) {
    Vector next = spec.dynamics * state;
    int offset = 0;
    for (int i = 0; i < spec.num_players(); ++i) {
      const int mi = InputDim(spec, i);
      next += spec.inputs[i] * joint_action.segment(offset + t * mi, mi);
      offset += horizon * mi;
    }
    state = next;
    z.segment((t + 1) * m, m) = state;
  }
  return z;
}

double DirectCost(const LQGameSpec& spec, int player, const Vector& joint_action) {
  const Vector z = SimulateDynamics(spec, joint_action);
  const int m = spec.state_dim();
  const int mi = InputDim(spec, player);
  int offset = 0;
  for (int i = 0; i < player; ++i) offset += spec.horizon * InputDim(spec, i);
  const Vector target =
      spec.targets.empty() ? Vector::Zero(m) : Vector(spec.targets[player]);
  double cost = 0.0;
  for (int t = 0; t <= spec.horizon; ++t) {
    const Vector e = z.segment(t * m, m) - target;
    cost += 0.5 * e.dot(spec.state_costs[player] * e);
  }
  for (int t = 0; t < spec.horizon; ++t) {
    const Vector u = joint_action.segment(offset + t * mi, mi);
    cost += 0.5 * u.dot(spec.input_costs[player] * u);
  }
  return cost;
}

// ---------------------------------------------------------------------------
// Necessary conditions

namespace {

void CheckPair(const LQGameSpec& spec, int source, int target) {
  const int n = spec.num_players();
  if (source < 0 || source >= n || target < 0 || target >= n) {
    throw Error(ErrorCode::kInvalidArgument, "player index out of range");
  }
  if (source == target) {
    throw Error(ErrorCode::kInvalidArgument, "source and target coincide");
  }
}

// [B, AB, ..., A^{blocks-1} B]
Matrix KrylovColumns(const Matrix& a, const Matrix& b, int blocks) {
  Matrix out(b.rows(), b.cols() * blocks);
  Matrix current = b;
  for (int p = 0; p < blocks; ++p) {
    out.middleCols(p * b.cols(), b.cols()) = current;
    current = (a * current).eval();
  }
  return out;
}

}  // namespace

ConditionCheck LQNecessaryCondition(const LQGameSpec& spec, int source, int target) {
  spec.Validate();
  CheckPair(spec, source, target);
  const Matrix& a = spec.dynamics;
  const Matrix ctrl = KrylovColumns(a, spec.inputs[source], spec.horizon);
  // Rows B_j^T (A^T)^p are the transposes of the columns A^p B_j.
  const Matrix obs = KrylovColumns(a, spec.inputs[target], spec.horizon).transpose();
  const Matrix& q = spec.state_costs[target];
  ConditionCheck check;
  check.residual_norm = (obs * q * ctrl).norm();
  const double scale = std::max(1.0, obs.norm() * q.norm() * ctrl.norm());
  check.holds = check.residual_norm <= kConditionTol * scale;
  return check;
}

Matrix SymmetricSqrt(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }
  if (eig.eigenvalues().minCoeff() < kPdFloor) {
    throw Error(ErrorCode::kInvalidArgument, "matrix is not positive definite");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

Matrix ControllableSubspace(const Matrix& a, const Matrix& b) {
  return RangeBasis(KrylovColumns(a, b, static_cast<int>(a.rows())));
}

Matrix UnobservableSubspace(const Matrix& c, const Matrix& a) {
  // [C; CA; ...] is the transpose of [C^T, A^T C^T, ...].
  return KernelBasis(
      KrylovColumns(a.transpose(), c.transpose(), static_cast<int>(a.rows())).transpose());
}

bool LQSubspaceCondition(const LQGameSpec& spec, int source, int target) {
  spec.Validate();
  CheckPair(spec, source, target);
  const int m = spec.state_dim();
  if (spec.horizon < m) {
    throw Error(ErrorCode::kInvalidArgument,
                "subspace form needs horizon T >= state dimension m");
  }
  const Matrix& q = spec.state_costs[target];
  Matrix root;
  try {
    root = SymmetricSqrt(q);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                PlayerTag("Q", target) + " must be positive definite");
  }
  const Matrix root_inv = root.inverse();
  const Matrix a_tilde = root * spec.dynamics * root_inv;
  const Matrix b_source = root * spec.inputs[source];
  const Matrix b_target = root * spec.inputs[target];

  const Matrix controllable = ControllableSubspace(a_tilde, b_source);
  const Matrix unobservable =
      UnobservableSubspace(b_target.transpose(), a_tilde.transpose());
  if (controllable.cols() == 0) return true;
  if (unobservable.cols() == 0) return false;
  const Matrix outside =
      controllable - unobservable * (unobservable.transpose() * controllable);
  Eigen::JacobiSVD<Matrix> svd(outside);
  return svd.singularValues()(0) <= kRankTol;
}

}  // namespace decouple
