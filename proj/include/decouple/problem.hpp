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

#ifndef DECOUPLE_PROBLEM_HPP_
#define DECOUPLE_PROBLEM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "decouple/bilinear.hpp"
#include "decouple/game.hpp"
#include "decouple/lq_game.hpp"
#include "decouple/simulator.hpp"

// Game specification documents.
//
// A document is a YAML mapping (JSON is accepted as well) whose `kind` selects
// the schema:
//
//   kind: quadratic
//   dims: [1, 1]
//   P: {"1": [[2]], "2": [[2]], "1,2": [[1]], "2,1": [[1]]}
//   r: [[1], [1]]                # optional, zero by default
//
//   kind: lq
//   A: [[1, 0], [0, 1]]
//   B: [[[1], [0]], [[0], [1]]]  # one m x m_i matrix per player
//   Q: [...]                     # one m x m matrix per player
//   R: [...]                     # one m_i x m_i matrix per player
//   T: 10
//   z0: [0.5, -1]
//   targets: [[1, 0], [0, 1]]    # optional
//
//   kind: bilinear
//   A: [[...]]                   # n_1 x n_2
//   B: [[...]]                   # n_2 x n_1
//   gamma1: 0.1
//   gamma2: 0.1
//   mode: simultaneous | alternating
//
// Shared optional keys: gamma (list of per-player step sizes or "uniform";
// quadratic and lq only, default "uniform"), tolerance (default 1e-9), seed
// (default 0), x0 (initial joint action, default zero). Players are numbered
// from 1 in documents. Unknown keys are rejected.

namespace decouple {

enum class ProblemKind { kQuadratic, kLQ, kBilinear };

const char* ProblemKindName(ProblemKind kind);

struct Problem {
  ProblemKind kind = ProblemKind::kQuadratic;
  // For lq: the lifted game. For bilinear: the coordinate-level game.
  QuadraticGame game;
  GameGraph graph;
  std::optional<LQGameSpec> lq;
  std::optional<LiftedLQGame> lifted;
  std::optional<BilinearGameSpec> bilinear;
  // Set when gamma was "uniform".
  std::optional<StepSizeRule> step_rule;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  Vector x0;

  // Raw LQ costs for lq problems, the quadratic costs otherwise.
  PlayerCostFn CostFunction() const;
};

// Throws Error(kParse) with "<source>:<line>:<column>: ..." on syntax, schema
// and shape errors; numeric failures (singular step-size rule, non-PD R)
// keep their own codes.
Problem ParseProblem(std::string_view text, std::string_view source_name = "<input>");

// Reads a file, or standard input when path is "-". Throws kIo on failure.
Problem LoadProblem(const std::string& path);

// A kind: quadratic document reproducing problem.game with the resolved step
// sizes, so that analyzing it yields the same graph.
std::string EmitGameDocument(const Problem& problem);

// Matrix dump of the game graph: dims, gamma, W (row-major) and offset. For
// lq problems the control maps G_i and H are included as well.
std::string EmitGraphDocument(const Problem& problem);

// "%.17g"
std::string FormatDouble(double value);

}  // namespace decouple

#endif  // DECOUPLE_PROBLEM_HPP_
