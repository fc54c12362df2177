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

#include "decouple/decoupling.hpp"

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace decouple {
namespace {

using testing::Rng;
using Path = std::vector<int>;

Matrix Power(const Matrix& w, int k) {
  Matrix m = Matrix::Identity(w.rows(), w.cols());
  for (int s = 0; s < k; ++s) m = m * w;
  return m;
}

std::set<Path> AsSet(const std::vector<Path>& paths) { return {paths.begin(), paths.end()}; }

TEST(CheckAlgebraicTest, BlockDiagonalIsDecoupledEverywhere) {
  Rng rng(1);
  const QuadraticGame game = testing::RandomGame(rng, {2, 1, 2}, 1.0);
  const GameGraph g = BuildGameGraph(game, StepSizes::Uniform(3, 0.2));
  for (const auto& r : AllPairsReport(g)) {
    EXPECT_TRUE(r.decoupled);
    EXPECT_EQ(r.FirstFailingPower(), 0);
  }
  EXPECT_EQ(AllPairsReport(g).size(), 6u);
}

TEST(CheckAlgebraicTest, ExampleOneDecoupled) {
  const GameGraph g = testing::ExampleOneGraph(1, 1, 1, -1, {0.5, 0.5, 0.5, 0.5});
  const DecouplingReport r = CheckAlgebraic(g, {0, 3});
  EXPECT_TRUE(r.decoupled);
  ASSERT_EQ(r.residuals.size(), 3u);
  ASSERT_EQ(r.normalizers.size(), 3u);
  EXPECT_EQ(r.method, Method::kAlgebraic);
}

TEST(CheckAlgebraicTest, ExampleOneFlippedFailsAtSecondPower) {
  const GameGraph g = testing::ExampleOneGraph(1, 1, 1, 1, {0.5, 0.5, 0.5, 0.5});
  const DecouplingReport r = CheckAlgebraic(g, {0, 3});
  EXPECT_FALSE(r.decoupled);
  EXPECT_EQ(r.FirstFailingPower(), 2);
  EXPECT_EQ(r.residuals[0], 0.0);
  // Two length-two paths, each of weight 1.
  EXPECT_NEAR(r.residuals[1], 2.0, 1e-15);
}

TEST(CheckAlgebraicTest, ResidualsAreBlockNormsOfPowers) {
  Rng rng(2);
  const QuadraticGame game = testing::RandomGame(rng, {2, 1, 1});
  const GameGraph g = BuildGameGraph(game, StepSizes({0.3, 0.2, 0.5}));
  const DecouplingReport r = CheckAlgebraic(g, {2, 0, 1e-9});
  ASSERT_EQ(r.residuals.size(), 3u);
  bool all_small = true;
  for (int k = 1; k <= 3; ++k) {
    const Matrix pk = Power(g.adjacency(), k);
    EXPECT_NEAR(r.residuals[k - 1], testing::BlockOf(pk, g.dims(), 0, 2).norm(), 1e-12);
    EXPECT_NEAR(r.normalizers[k - 1], pk.norm(), 1e-12);
    all_small = all_small && IsNegligible(r.residuals[k - 1], r.normalizers[k - 1], 1e-9);
  }
  EXPECT_EQ(r.decoupled, all_small);
}

TEST(CheckAlgebraicTest, RejectsSelfPairAndBadIndices) {
  const GameGraph g = testing::ExampleOneGraph(1, 1, 1, -1, {0.5, 0.5, 0.5, 0.5});
  EXPECT_THROW(CheckAlgebraic(g, {1, 1}), Error);
  EXPECT_THROW(CheckAlgebraic(g, {0, 4}), Error);
  EXPECT_THROW(CheckAlgebraic(g, {0, 1, -1.0}), Error);
  EXPECT_THROW(CheckPaths(g, {2, 2}), Error);
}

TEST(IsNegligibleTest, ScalesWithNormalizer) {
  EXPECT_TRUE(IsNegligible(1e-10, 0.5, 1e-9));
  EXPECT_FALSE(IsNegligible(2e-9, 0.5, 1e-9));
  EXPECT_TRUE(IsNegligible(2e-9, 10.0, 1e-9));
  EXPECT_TRUE(IsNegligible(0.0, 0.0, 0.0));
}

TEST(EnumeratePathsTest, ExampleOnePathSets) {
  const double a = 0.7, b = -0.4, c = 1.3, d = 0.9;
  const std::vector<double> w = {0.2, 0.3, 0.5, 0.6};
  const GameGraph g = testing::ExampleOneGraph(a, b, c, d, w, /*with_reverse=*/false);

  EXPECT_TRUE(EnumeratePaths(g, 0, 3, 1).paths.empty());

  const PathSet two = EnumeratePaths(g, 0, 3, 2);
  EXPECT_EQ(AsSet(two.paths), (std::set<Path>{{0, 1, 3}, {0, 2, 3}}));
  EXPECT_NEAR(two.weight_sum(0, 0), a * c + b * d, 1e-15);

  const PathSet three = EnumeratePaths(g, 0, 3, 3);
  EXPECT_EQ(AsSet(three.paths), (std::set<Path>{{0, 0, 1, 3},
                                                {0, 0, 2, 3},
                                                {0, 1, 1, 3},
                                                {0, 2, 2, 3},
                                                {0, 1, 3, 3},
                                                {0, 2, 3, 3}}));
  EXPECT_NEAR(three.weight_sum(0, 0),
              (w[0] + w[1] + w[3]) * a * c + (w[0] + w[2] + w[3]) * b * d, 1e-14);
}

TEST(EnumeratePathsTest, EveryStepIsAnEdge) {
  Rng rng(4);
  const QuadraticGame game = testing::RandomGame(rng, {1, 2, 1, 2}, 0.5);
  const GameGraph g = BuildGameGraph(game, StepSizes::Uniform(4, 0.3));
  for (int k = 1; k <= 4; ++k) {
    for (const Path& p : EnumeratePaths(g, 1, 3, k).paths) {
      ASSERT_EQ(static_cast<int>(p.size()), k + 1);
      EXPECT_EQ(p.front(), 1);
      EXPECT_EQ(p.back(), 3);
      for (std::size_t s = 0; s + 1 < p.size(); ++s) EXPECT_TRUE(g.HasEdge(p[s], p[s + 1]));
    }
  }
}

TEST(EnumeratePathsTest, WeightSumMatchesPowerAndBruteForce) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dims = testing::RandomDims(rng, testing::UniformInt(rng, 2, 4), 2);
    const QuadraticGame game = testing::RandomGame(rng, dims);
    const GameGraph g =
        BuildGameGraph(game, testing::RandomStepSizes(rng, static_cast<int>(dims.size())));
    const int n = g.total_dim();
    const int s = testing::UniformInt(rng, 0, g.num_players() - 1);
    const int t = testing::UniformInt(rng, 0, g.num_players() - 1);
    for (int k = 1; k < std::min(n, 5); ++k) {
      const Matrix block = testing::BlockOf(Power(g.adjacency(), k), g.dims(), t, s);
      const Matrix brute = testing::BruteForceWalkSum(g.adjacency(), g.dims(), s, t, k);
      const Matrix pruned = EnumeratePaths(g, s, t, k).weight_sum;
      const Matrix complete = EnumeratePaths(g, s, t, k, EdgePolicy::kComplete).weight_sum;
      const double scale = std::max(1.0, block.norm());
      EXPECT_LE((brute - block).norm(), 1e-12 * scale);
      EXPECT_LE((pruned - brute).norm(), 1e-12 * scale);
      EXPECT_LE((complete - brute).norm(), 1e-12 * scale);
    }
  }
}

TEST(CheckPathsTest, UnreachableTargetIsVacuouslyDecoupled) {
  // 1 -> 2 only; player 3 is isolated.
  Matrix w = 0.5 * Matrix::Identity(3, 3);
  w(1, 0) = 1.0;
  const GameGraph g(PlayerDims::Scalar(3), w, StepSizes::Uniform(3, 1.0), Vector::Zero(3));
  const DecouplingReport r = CheckPaths(g, {0, 2});
  EXPECT_TRUE(r.decoupled);
  for (double v : r.residuals) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.method, Method::kPathEnumeration);
}

TEST(CheckPathsTest, CapIsEnforced) {
  Rng rng(8);
  const QuadraticGame game = testing::RandomGame(rng, {1, 1, 1, 1, 1, 1}, 0.0);
  const GameGraph g = BuildGameGraph(game, StepSizes::Uniform(6, 0.1));
  try {
    CheckPaths(g, {0, 5}, 0.0, 100);
    ADD_FAILURE() << "expected the cap to trip";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationCapExceeded);
  }
  EXPECT_GT(EstimatePathExtensions(g, 0), 100.0);
}

TEST(CheckPathsTest, AgreesWithAlgebraicOnRandomGames) {
  Rng rng(10);
  int decoupled = 0, coupled = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int players = testing::UniformInt(rng, 2, 4);
    const auto dims = testing::RandomDims(rng, players, 2);
    const QuadraticGame game = testing::RandomGame(rng, dims, 0.6);
    const GameGraph g = BuildGameGraph(game, testing::RandomStepSizes(rng, players));
    for (int s = 0; s < players; ++s) {
      const auto from_source = CheckPathsFromSource(g, s);
      for (const auto& r : from_source) {
        const DecouplingReport alg = CheckAlgebraic(g, r.query);
        const DecouplingReport single = CheckPaths(g, r.query);
        ASSERT_EQ(alg.decoupled, r.decoupled) << "trial " << trial;
        ASSERT_EQ(single.decoupled, r.decoupled);
        (r.decoupled ? decoupled : coupled)++;
      }
    }
  }
  // The sweep must exercise both verdicts to mean anything.
  EXPECT_GT(decoupled, 50);
  EXPECT_GT(coupled, 50);
}

TEST(AllPairsReportTest, MatchesPerPairChecks) {
  Rng rng(12);
  const QuadraticGame game = testing::RandomGame(rng, {2, 1, 2, 1}, 0.5);
  const GameGraph g = BuildGameGraph(game, StepSizes({0.1, 0.2, 0.3, 0.4}));
  const auto all = AllPairsReport(g, 1e-9);
  ASSERT_EQ(all.size(), 12u);
  for (const auto& r : all) {
    const DecouplingReport single = CheckAlgebraic(g, r.query);
    EXPECT_EQ(single.decoupled, r.decoupled);
    EXPECT_EQ(single.residuals, r.residuals);
  }
}

TEST(AllPairsReportTest, ExampleOnePairs) {
  const GameGraph g = testing::ExampleOneGraph(1, 1, 1, -1, {0.5, 0.5, 0.5, 0.5});
  for (const auto& r : AllPairsReport(g)) {
    const bool endpoints = (r.query.source == 0 && r.query.target == 3) ||
                           (r.query.source == 3 && r.query.target == 0);
    if (endpoints) EXPECT_TRUE(r.decoupled);
    // Directly connected pairs are never decoupled.
    if (g.HasEdge(r.query.source, r.query.target)) EXPECT_FALSE(r.decoupled);
  }
}

TEST(CayleyHamiltonTest, DecoupledStaysZeroPastN) {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> w = {testing::Uniform(rng, 0.1, 0.9),
                                   0.0, 0.0, testing::Uniform(rng, 0.1, 0.9)};
    std::vector<double> loops = w;
    loops[1] = loops[2] = testing::Uniform(rng, 0.1, 0.9);
    const double a = testing::Uniform(rng, -1, 1), b = testing::Uniform(rng, 0.2, 1);
    const double c = testing::Uniform(rng, -1, 1);
    const GameGraph g = testing::ExampleOneGraph(a, b, c, -a * c / b, loops);
    ASSERT_TRUE(CheckAlgebraic(g, {0, 3}).decoupled);
    const int n = g.total_dim();
    for (int k = n; k <= 2 * n; ++k) {
      const Matrix pk = Power(g.adjacency(), k);
      EXPECT_TRUE(IsNegligible(pk(3, 0), pk.norm(), 1e-9)) << "k=" << k;
    }
  }
}

TEST(PotentialSymmetryTest, UncoupledGame) {
  Rng rng(16);
  const QuadraticGame game = testing::RandomPotentialGame(rng, {1, 2, 1}, 1.0);
  for (const auto& v : CheckPotentialSymmetry(game, StepSizes({0.1, 0.2, 0.3}))) {
    EXPECT_TRUE(v.forward);
    EXPECT_TRUE(v.backward);
  }
}

TEST(PotentialSymmetryTest, RandomPotentialGamesAgree) {
  Rng rng(18);
  int decoupled = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int players = testing::UniformInt(rng, 2, 5);
    const QuadraticGame game =
        testing::RandomPotentialGame(rng, testing::RandomDims(rng, players, 2), 0.6);
    for (const auto& v :
         CheckPotentialSymmetry(game, testing::RandomStepSizes(rng, players))) {
      EXPECT_EQ(v.forward, v.backward);
      decoupled += v.forward;
    }
  }
  EXPECT_GT(decoupled, 0);
}

TEST(PotentialSymmetryTest, RejectsNonPotentialGame) {
  QuadraticGame game{PlayerDims({1, 1})};
  game.SetSelf(0, Matrix::Ones(1, 1));
  game.SetSelf(1, Matrix::Ones(1, 1));
  game.SetCross(0, 1, Matrix::Ones(1, 1));
  try {
    CheckPotentialSymmetry(game, StepSizes::Uniform(2, 0.1));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPotentialGame);
  }
}

TEST(PotentialSymmetryTest, SymmetrizedExampleOne) {
  // Example one with symmetric weights is a potential game at unit steps.
  const GameGraph g = testing::ExampleOneGraph(1, 1, 1, -1, {0.5, 0.5, 0.5, 0.5});
  const QuadraticGame game = GameFromGraph(g);
  bool seen = false;
  for (const auto& v : CheckPotentialSymmetry(game, g.gamma())) {
    if (v.first == 0 && v.second == 3) {
      seen = true;
      EXPECT_TRUE(v.forward);
      EXPECT_TRUE(v.backward);
    }
  }
  EXPECT_TRUE(seen);
}

}  // namespace
}  // namespace decouple
