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

#include "decouple/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <utility>

namespace decouple {

// ---------------------------------------------------------------------------
// Disturbances

namespace {

// Standard-specified engine and seeding, so draws are identical across
// standard libraries. Distributions are implemented locally for the same
// reason.
double Unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Vector SampleBall(std::uint64_t seed, int step, double bound, int dim) {
  if (bound == 0.0) return Vector::Zero(dim);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step)};
  std::mt19937_64 rng(seq);
  Vector direction(dim);
  double norm = 0.0;
  do {
    for (int c = 0; c < dim; ++c) {
      // Box-Muller; 1 - u keeps the log argument in (0, 1].
      const double u1 = 1.0 - Unit(rng);
      const double u2 = Unit(rng);
      direction(c) = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    }
    norm = direction.norm();
  } while (norm == 0.0);
  const double radius = bound * std::pow(Unit(rng), 1.0 / dim);
  return direction * (radius / norm);
}

DisturbanceSignal::DisturbanceSignal(int player, Kind kind)
    : player_(player), kind_(std::move(kind)) {
  if (player < 0) throw Error(ErrorCode::kInvalidArgument, "negative player index");
  if (const auto* s = std::get_if<SeededUniform>(&kind_)) {
    if (!std::isfinite(s->bound) || s->bound < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "disturbance bound must be >= 0");
    }
  }
}

Vector DisturbanceSignal::Local(int step, int player_dim) const {
  auto check = [player_dim](const Vector& v) -> Vector {
    if (v.size() != player_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "disturbance has length " + std::to_string(v.size()) +
                      ", player dimension is " + std::to_string(player_dim));
    }
    return v;
  };
  return std::visit(
      Overloaded{
          [&](const Zero&) -> Vector { return Vector::Zero(player_dim); },
          [&](const Constant& c) -> Vector { return check(c.value); },
          [&](const Impulse& i) -> Vector {
            return i.step == step ? check(i.value) : Vector::Zero(player_dim);
          },
          [&](const SeededUniform& s) -> Vector {
            return SampleBall(s.seed, step, s.bound, player_dim);
          },
          [&](const Explicit& e) -> Vector {
            if (step < 0 || step >= static_cast<int>(e.values.size())) {
              return Vector::Zero(player_dim);
            }
            return check(e.values[step]);
          },
      },
      kind_);
}

Vector DisturbanceSignal::Joint(int step, const PlayerDims& dims) const {
  Vector d = Vector::Zero(dims.total());
  d.segment(dims.offset(player_), dims.dim(player_)) = Local(step, dims.dim(player_));
  return d;
}

// ---------------------------------------------------------------------------
// Trajectories

Trajectory::Trajectory(PlayerDims dims, std::vector<Vector> iterates,
                       std::vector<Vector> disturbances, Matrix costs)
    : dims_(std::move(dims)),
      iterates_(std::move(iterates)),
      disturbances_(std::move(disturbances)),
      costs_(std::move(costs)) {}

Vector Trajectory::PlayerSlice(int player, int k) const {
  return iterates_.at(k).segment(dims_.offset(player), dims_.dim(player));
}

DivergenceError::DivergenceError(int step, Trajectory partial)
    : Error(ErrorCode::kDivergence,
            "iterate " + std::to_string(step) + " is not finite; dynamics diverged"),
      step_(step),
      partial_(std::move(partial)) {}

namespace {

Matrix CostTable(const PlayerDims& dims, const std::vector<Vector>& iterates,
                 const PlayerCostFn& cost) {
  if (!cost) return Matrix();
  Matrix table(dims.num_players(), static_cast<Eigen::Index>(iterates.size()));
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    for (int i = 0; i < dims.num_players(); ++i) table(i, k) = cost(i, iterates[k]);
  }
  return table;
}

}  // namespace

Trajectory Run(const GameGraph& graph, const Vector& x0, int steps,
               const DisturbanceSignal& disturbance, const PlayerCostFn& cost) {
  const PlayerDims& dims = graph.dims();
  if (x0.size() != dims.total()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "x0 has length " + std::to_string(x0.size()) + ", expected " +
                    std::to_string(dims.total()));
  }
  if (steps < 0) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 0");
  if (disturbance.player() >= dims.num_players()) {
    throw Error(ErrorCode::kInvalidArgument, "disturbed player out of range");
  }
  const Vector gamma = graph.gamma().Expand(dims);
  const Matrix& w = graph.adjacency();

  std::vector<Vector> iterates;
  std::vector<Vector> applied;
  iterates.reserve(steps + 1);
  applied.reserve(steps);
  iterates.push_back(x0);
  for (int k = 0; k < steps; ++k) {
    Vector d = disturbance.Joint(k, dims);
    Vector next = w * iterates.back() - graph.offset() - gamma.cwiseProduct(d);
    if (!next.allFinite()) {
      Matrix costs = CostTable(dims, iterates, cost);
      throw DivergenceError(k + 1, Trajectory(dims, std::move(iterates),
                                              std::move(applied), std::move(costs)));
    }
    applied.push_back(std::move(d));
    iterates.push_back(std::move(next));
  }
  Matrix costs = CostTable(dims, iterates, cost);
  return Trajectory(dims, std::move(iterates), std::move(applied), std::move(costs));
}

DeviationReport Deviation(const Trajectory& clean, const Trajectory& corrupted) {
  if (!(clean.dims() == corrupted.dims())) {
    throw Error(ErrorCode::kDimensionMismatch, "trajectories have different players");
  }
  const PlayerDims& dims = clean.dims();
  const int count = std::min(clean.steps(), corrupted.steps()) + 1;
  DeviationReport report;
  report.compared_iterates = count;
  report.players.resize(dims.num_players());
  for (int i = 0; i < dims.num_players(); ++i) {
    double max_dev = 0.0;
    double max_norm = 0.0;
    for (int k = 0; k < count; ++k) {
      const Vector x = clean.PlayerSlice(i, k);
      max_dev = std::max(max_dev, (corrupted.PlayerSlice(i, k) - x).norm());
      max_norm = std::max(max_norm, x.norm());
    }
    report.players[i].max_deviation = max_dev;
    report.players[i].relative_deviation = max_dev / std::max(1.0, max_norm);
  }
  if (clean.has_costs()) report.clean_costs = clean.costs().leftCols(count);
  if (corrupted.has_costs()) report.corrupted_costs = corrupted.costs().leftCols(count);
  return report;
}

DeviationReport Compare(const GameGraph& graph, const Vector& x0, int steps,
                        const DisturbanceSignal& disturbance, const PlayerCostFn& cost) {
  const Trajectory clean =
      Run(graph, x0, steps, DisturbanceSignal::None(disturbance.player()), cost);
  try {
    return Deviation(clean, Run(graph, x0, steps, disturbance, cost));
  } catch (const DivergenceError& e) {
    DeviationReport report = Deviation(clean, e.partial());
    report.diverged = true;
    return report;
  }
}

std::uint64_t SweepSeed(std::uint64_t seed, int position) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(position) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<SweepPoint> MagnitudeSweep(const GameGraph& graph, const Vector& x0,
                                       int steps, int player,
                                       const std::vector<double>& bounds,
                                       std::uint64_t seed, const PlayerCostFn& cost,
                                       int max_threads) {
  for (std::size_t p = 0; p < bounds.size(); ++p) {
    if (!std::isfinite(bounds[p]) || bounds[p] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "sweep bounds must be finite and >= 0");
    }
    if (p > 0 && bounds[p] < bounds[p - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "sweep bounds must be nondecreasing");
    }
  }
  std::vector<SweepPoint> points(bounds.size());
  auto evaluate = [&](std::size_t p) {
    const DisturbanceSignal signal(
        player, DisturbanceSignal::SeededUniform{SweepSeed(seed, static_cast<int>(p)),
                                                 bounds[p]});
    points[p] = SweepPoint{bounds[p], Compare(graph, x0, steps, signal, cost)};
  };

  const int workers =
      std::max(1, std::min<int>(max_threads, static_cast<int>(bounds.size())));
  if (workers == 1) {
    for (std::size_t p = 0; p < bounds.size(); ++p) evaluate(p);
    return points;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t p = next++; p < bounds.size(); p = next++) evaluate(p);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

}  // namespace decouple
