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

#ifndef DECOUPLE_SIMULATOR_HPP_
#define DECOUPLE_SIMULATOR_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "decouple/game.hpp"

// Gradient play with and without an injected disturbance:
//   x^{k+1} = W x^k - Gamma r_bar
//   y^{k+1} = W y^k - Gamma r_bar - Gamma d^k
// where every d^k is zero outside the disturbed player's block.

namespace decouple {

// Per-player cost evaluated at a joint action; used to record cost series.
using PlayerCostFn = std::function<double(int player, const Vector& joint_action)>;

class DisturbanceSignal {
 public:
  struct Zero {};
  struct Constant {
    Vector value;
  };
  struct Impulse {
    int step = 0;
    Vector value;
  };
  // Fresh draw every iteration, uniform on the Euclidean ball of radius
  // `bound` in R^{n_i}; a pure function of (seed, bound, iteration).
  struct SeededUniform {
    std::uint64_t seed = 0;
    double bound = 0.0;
  };
  // values[k] is applied at iteration k; zero past the end.
  struct Explicit {
    std::vector<Vector> values;
  };
  using Kind = std::variant<Zero, Constant, Impulse, SeededUniform, Explicit>;

  DisturbanceSignal(int player, Kind kind);

  static DisturbanceSignal None(int player = 0) { return {player, Zero{}}; }

  int player() const { return player_; }
  const Kind& kind() const { return kind_; }

  // The player's own block of d^k.
  Vector Local(int step, int player_dim) const;
  // d^k embedded in R^n (zero outside the player's block).
  Vector Joint(int step, const PlayerDims& dims) const;

 private:
  int player_;
  Kind kind_;
};

// Uniform draw from the ball of radius `bound` in R^dim, reproducible from
// (seed, step) alone.
Vector SampleBall(std::uint64_t seed, int step, double bound, int dim);

class Trajectory {
 public:
  Trajectory(PlayerDims dims, std::vector<Vector> iterates,
             std::vector<Vector> disturbances, Matrix costs);

  const PlayerDims& dims() const { return dims_; }
  int steps() const { return static_cast<int>(iterates_.size()) - 1; }
  const std::vector<Vector>& iterates() const { return iterates_; }
  const Vector& iterate(int k) const { return iterates_.at(k); }
  Vector PlayerSlice(int player, int k) const;
  // The joint disturbance applied to produce iterate k+1.
  const std::vector<Vector>& disturbances() const { return disturbances_; }

  bool has_costs() const { return costs_.size() > 0; }
  // costs(i, k) = f_i(x^k); players x (steps + 1). Empty without a cost fn.
  const Matrix& costs() const { return costs_; }

 private:
  PlayerDims dims_;
  std::vector<Vector> iterates_;
  std::vector<Vector> disturbances_;
  Matrix costs_;
};

// Thrown by Run when an iterate stops being finite. Carries every finite
// iterate produced before the failure.
class DivergenceError : public Error {
 public:
  DivergenceError(int step, Trajectory partial);

  int step() const { return step_; }
  const Trajectory& partial() const { return partial_; }

 private:
  int step_;
  Trajectory partial_;
};

Trajectory Run(const GameGraph& graph, const Vector& x0, int steps,
               const DisturbanceSignal& disturbance, const PlayerCostFn& cost = {});

struct PlayerDeviation {
  double max_deviation = 0.0;
  double relative_deviation = 0.0;
};

struct DeviationReport {
  std::vector<PlayerDeviation> players;
  Matrix clean_costs;      // empty without a cost fn
  Matrix corrupted_costs;  // empty without a cost fn
  bool diverged = false;
  // Number of iterates (from x^0) the comparison covers.
  int compared_iterates = 0;
};

// Max over k of ||y_j^k - x_j^k||, normalized by max(1, max_k ||x_j^k||).
DeviationReport Deviation(const Trajectory& clean, const Trajectory& corrupted);

// Runs both recursions from x0. A diverging corrupted run is compared over
// its finite prefix and flagged; a diverging clean run propagates the error.
DeviationReport Compare(const GameGraph& graph, const Vector& x0, int steps,
                        const DisturbanceSignal& disturbance,
                        const PlayerCostFn& cost = {});

std::uint64_t SweepSeed(std::uint64_t seed, int position);

struct SweepPoint {
  double bound = 0.0;
  DeviationReport report;
};

// One Compare per bound with SeededUniform disturbances at `player`; the
// bound at position p draws from SweepSeed(seed, p). Points run on up to
// `max_threads` threads; results are independent of the thread count.
std::vector<SweepPoint> MagnitudeSweep(const GameGraph& graph, const Vector& x0,
                                       int steps, int player,
                                       const std::vector<double>& bounds,
                                       std::uint64_t seed,
                                       const PlayerCostFn& cost = {},
                                       int max_threads = 1);

}  // namespace decouple

#endif  // DECOUPLE_SIMULATOR_HPP_
