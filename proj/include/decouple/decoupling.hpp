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

#ifndef DECOUPLE_DECOUPLING_HPP_
#define DECOUPLE_DECOUPLING_HPP_

#include <cstdint>
#include <vector>

#include "decouple/game.hpp"

// Disturbance decoupling between a disturbed player (source) and an observed
// player (target).
//
// The target is decoupled from the source iff the (target, source) block of
// W^k vanishes for every 1 <= k < n, where n is the total action dimension.
// Two independent deciders are provided: repeated matrix multiplication
// (CheckAlgebraic) and explicit enumeration of game-graph paths, summing path
// weights (CheckPaths).

namespace decouple {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::int64_t kPathEnumerationCap = 10'000'000;

struct DecouplingQuery {
  int source = 0;
  int target = 0;
  double tolerance = kDefaultTolerance;
};

enum class Method { kAlgebraic, kPathEnumeration, kExact };

const char* MethodName(Method method);

struct DecouplingReport {
  DecouplingQuery query;
  bool decoupled = false;
  // Entry k-1 holds ||(W^k)_{target,source}||_F for k = 1 .. n-1.
  std::vector<double> residuals;
  // Entry k-1 holds ||W^k||_F.
  std::vector<double> normalizers;
  Method method = Method::kAlgebraic;

  // Smallest k whose residual fails the zero test, or 0 when none does.
  int FirstFailingPower() const;
};

// Zero test for one power: residual <= tolerance * max(1, normalizer).
bool IsNegligible(double residual, double normalizer, double tolerance);

// Throws kInvalidArgument for source == target, out-of-range players or a
// negative tolerance.
DecouplingReport CheckAlgebraic(const GameGraph& graph, const DecouplingQuery& query);

// One report per ordered pair (i, j), i != j, ordered by source then target.
// The powers of W are formed once and shared by all pairs.
std::vector<DecouplingReport> AllPairsReport(const GameGraph& graph,
                                             double tolerance = kDefaultTolerance);

// How edges are chosen when enumerating paths.
enum class EdgePolicy {
  // Edge j -> i exists when block (i, j) has an entry above the zero tolerance;
  // self loops always exist.
  kNonzeroBlocks,
  // Every ordered node pair is an edge (zero-weight edges included).
  kComplete,
};

struct PathSet {
  int source = 0;
  int target = 0;
  int length = 0;
  // Node sequences (source, v_1, ..., v_{length-1}, target).
  std::vector<std::vector<int>> paths;
  // Sum over paths of W_{target,v_{k-1}} ... W_{v_1,source}; n_target x n_source.
  Matrix weight_sum;
};

// Explicitly lists every path of the given length. Exponential; meant for
// small graphs and tests. Throws kEnumerationCapExceeded past `cap` paths.
PathSet EnumeratePaths(const GameGraph& graph, int source, int target, int length,
                       EdgePolicy policy = EdgePolicy::kNonzeroBlocks,
                       double edge_zero_tol = 0.0,
                       std::int64_t cap = kPathEnumerationCap);

// Number of path extensions a depth-first enumeration from `source` up to
// length n-1 performs (walk counts on the edge graph).
double EstimatePathExtensions(const GameGraph& graph, int source,
                              double edge_zero_tol = 0.0);

// Path-weight decider. Walks every path that starts at the source, summing
// weights per (length, end node), so all targets are served by one walk.
// Throws kEnumerationCapExceeded when the estimated number of extensions
// exceeds `cap`.
DecouplingReport CheckPaths(const GameGraph& graph, const DecouplingQuery& query,
                            double edge_zero_tol = 0.0,
                            std::int64_t cap = kPathEnumerationCap);

// CheckPaths for every target at once; reports ordered by target, skipping
// the source itself.
std::vector<DecouplingReport> CheckPathsFromSource(
    const GameGraph& graph, int source, double tolerance = kDefaultTolerance,
    double edge_zero_tol = 0.0, std::int64_t cap = kPathEnumerationCap);

struct SymmetryVerdict {
  int first = 0;
  int second = 0;
  bool forward = false;   // second decoupled from a disturbance at first
  bool backward = false;  // first decoupled from a disturbance at second
};

// Runs CheckAlgebraic both ways for every unordered pair of a potential game.
// Throws kNotPotentialGame when some ||P_ij - P_ji^T||_F exceeds
// tolerance * max(1, ||P_ij||_F).
std::vector<SymmetryVerdict> CheckPotentialSymmetry(const QuadraticGame& game,
                                                    const StepSizes& gamma,
                                                    double tolerance = kDefaultTolerance);

}  // namespace decouple

#endif  // DECOUPLE_DECOUPLING_HPP_
