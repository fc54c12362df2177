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

#ifndef DECOUPLE_LQ_GAME_HPP_
#define DECOUPLE_LQ_GAME_HPP_

#include <vector>

#include "decouple/game.hpp"

///////////////////////////////////////////////////////////////////////////////
//
// Finite-horizon LQ games played in open-loop control sequences.
//
// Dynamics z^{t+1} = A z^t + sum_i B_i u_i^t, t = 0 .. T-1. Player i pays
//   1/2 sum_{t=0}^{T} (z^t - c_i)^T Q_i (z^t - c_i)
//     + 1/2 sum_{t=0}^{T-1} (u_i^t)^T R_i u_i^t
// and picks U_i = (u_i^0, ..., u_i^{T-1}). Stacking Z = (z^0, ..., z^T) gives
// Z = sum_i G_i U_i + H z^0, which turns the dynamic game into a one-shot
// quadratic game with
//   P_i  = G_i^T Qbar_i G_i + Rbar_i
//   P_ij = G_i^T Qbar_i G_j
//   r_i  = G_i^T Qbar_i (H z^0 - C_i).
//
// Block row t of G_i holds A^{t-1-s} B_i in block column s < t; block row 0
// is zero. H stacks I, A, ..., A^T.
//
///////////////////////////////////////////////////////////////////////////////

namespace decouple {

struct LQGameSpec {
  Matrix dynamics;                  // A, m x m
  std::vector<Matrix> inputs;       // B_i, m x m_i
  std::vector<Matrix> state_costs;  // Q_i, m x m symmetric
  std::vector<Matrix> input_costs;  // R_i, m_i x m_i symmetric PD
  int horizon = 1;                  // T
  Vector initial_state;             // z^0
  std::vector<Vector> targets;      // c_i; empty means all zero

  int num_players() const { return static_cast<int>(inputs.size()); }
  int state_dim() const { return static_cast<int>(dynamics.rows()); }

  // Throws kDimensionMismatch / kInvalidArgument on inconsistent shapes,
  // asymmetric Q_i (1e-12), R_i that is not symmetric positive definite, or
  // T < 1.
  void Validate() const;
};

struct LiftedLQGame {
  std::vector<Matrix> control_maps;       // G_i, (T+1)m x T m_i
  Matrix free_response;                   // H, (T+1)m x m
  std::vector<Matrix> lifted_state_costs; // Qbar_i
  std::vector<Matrix> lifted_input_costs; // Rbar_i
  std::vector<Vector> lifted_targets;     // C_i
  Vector initial_state;
  QuadraticGame game;

  // Z = sum_i G_i U_i + H z^0 for a joint action U.
  Vector States(const Vector& joint_action) const;
  // The raw LQ cost of player i (targets included).
  double Cost(int player, const Vector& joint_action) const;
};

LiftedLQGame Lift(const LQGameSpec& spec);

// Direct forward recursion of the dynamics; returns Z stacked as in the lift.
// `joint_action` stacks U_1 .. U_N.
Vector SimulateDynamics(const LQGameSpec& spec, const Vector& joint_action);

// Raw LQ cost of player i evaluated through SimulateDynamics.
double DirectCost(const LQGameSpec& spec, int player, const Vector& joint_action);

struct ConditionCheck {
  bool holds = false;
  double residual_norm = 0.0;
};

// Necessary condition for `target` to be decoupled from `source`:
//   [B_j^T; B_j^T A^T; ...; B_j^T (A^T)^{T-1}] Q_j [B_i, A B_i, ..., A^{T-1} B_i] = 0
// Holds when the Frobenius norm is <= 1e-9 max(1, ||O|| ||Q_j|| ||C||).
ConditionCheck LQNecessaryCondition(const LQGameSpec& spec, int source, int target);

// Subspace form of the same condition: with Atil = Q_j^{1/2} A Q_j^{-1/2},
// Btil_i = Q_j^{1/2} B_i, Btil_j = Q_j^{1/2} B_j, the controllable subspace of
// (Atil, Btil_i) must lie in the unobservable subspace of (Btil_j^T, Atil^T).
// Requires Q_j positive definite and T >= m.
bool LQSubspaceCondition(const LQGameSpec& spec, int source, int target);

// Orthonormal basis of the controllable subspace of (A, B), i.e. the range of
// [B, AB, ..., A^{m-1} B]; singular values below 1e-9 sigma_max count as zero.
Matrix ControllableSubspace(const Matrix& a, const Matrix& b);

// Orthonormal basis of the unobservable subspace of the pair (C, A), i.e. the
// kernel of [C; CA; ...; CA^{m-1}].
Matrix UnobservableSubspace(const Matrix& c, const Matrix& a);

// Symmetric square root via eigendecomposition. Throws kInvalidArgument when
// the smallest eigenvalue is below 1e-12 (not positive definite).
Matrix SymmetricSqrt(const Matrix& q);

}  // namespace decouple

#endif  // DECOUPLE_LQ_GAME_HPP_
