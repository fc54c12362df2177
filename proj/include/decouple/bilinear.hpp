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

#ifndef DECOUPLE_BILINEAR_HPP_
#define DECOUPLE_BILINEAR_HPP_

#include "decouple/game.hpp"

// Two-player bilinear games f_1 = x_1^T A x_2, f_2 = x_1^T B^T x_2 under
// simultaneous or alternating gradient play.
//
// Graphs built here treat every scalar coordinate as its own player node:
// coordinate (side 1, index k) is node k and (side 2, index k) is node
// n_1 + k, all indices 0-based.

namespace decouple {

enum class PlayMode { kSimultaneous, kAlternating };

struct BilinearGameSpec {
  Matrix payoff_first;   // A, n_1 x n_2
  Matrix payoff_second;  // B, n_2 x n_1
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  PlayMode mode = PlayMode::kSimultaneous;

  int first_dim() const { return static_cast<int>(payoff_first.rows()); }
  int second_dim() const { return static_cast<int>(payoff_first.cols()); }

  // Throws on empty or mismatched payoffs and on negative or non-finite
  // step sizes. Zero step sizes are accepted (W = I).
  void Validate() const;
};

// Simultaneous: [[I, -g1 A], [-g2 B, I]].
// Alternating:  [[I, -g1 A], [-g2 B, I + g1 g2 B A]].
Matrix BilinearAdjacency(const BilinearGameSpec& spec);

// Graph over n_1 + n_2 scalar nodes with zero offset. Node step sizes are
// gamma1 on side 1 and gamma2 on side 2; both must be positive.
GameGraph BuildBilinearGraph(const BilinearGameSpec& spec);

// A coordinate-level quadratic game whose gradient-play graph under the node
// step sizes is exactly BuildBilinearGraph(spec). For simultaneous play this
// is the bilinear game itself; for alternating play the (2,2) block carries
// -g1 B A so that I - g2 (-g1 B A) reproduces the alternating update.
QuadraticGame BilinearCoordinateGame(const BilinearGameSpec& spec);

int CoordinateNode(const BilinearGameSpec& spec, int side, int index);

// Simultaneous step: x1' = x1 - g1 A x2, x2' = x2 - g2 B x1.
// Alternating step:  x1' = x1 - g1 A x2, x2' = x2 - g2 B x1'.
void BilinearStep(const BilinearGameSpec& spec, Vector& x1, Vector& x2);

struct SameSideCheck {
  bool holds = false;
  double value = 0.0;
};

// Necessary condition for coordinate j of `side` to be decoupled from
// coordinate i of the same side (either play mode):
//   side 1: sum_l b_{l i} a_{j l} = 0
//   side 2: sum_l b_{j l} a_{l i} = 0
// to 1e-12 absolute. Step sizes are ignored.
SameSideCheck SameSideCondition(const BilinearGameSpec& spec, int side, int i, int j);

struct CrossSideCheck {
  bool holds = false;
  double direct = 0.0;  // b_{ji} (from side 1) or a_{ji} (from side 2)
  double second_order = 0.0;
};

// Necessary condition for coordinate j of the other side to be decoupled from
// coordinate i of `from_side`:
//   from side 1: b_{ji} = 0 and sum_q b_{q i} sum_l a_{l q} b_{j l} = 0
//   from side 2: a_{ji} = 0 and sum_q a_{q i} sum_l b_{l q} a_{j l} = 0
// to 1e-12 absolute.
CrossSideCheck CrossSideCondition(const BilinearGameSpec& spec, int from_side, int i,
                                  int j);

}  // namespace decouple

#endif  // DECOUPLE_BILINEAR_HPP_
