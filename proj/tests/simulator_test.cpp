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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "decouple/decoupling.hpp"
#include "decouple/lq_game.hpp"
#include "support/oracles.hpp"

namespace decouple {
namespace {

using testing::Rng;

GameGraph RandomGraph(Rng& rng, double zero_fraction = 0.3) {
  const int players = testing::UniformInt(rng, 2, 4);
  const auto dims = testing::RandomDims(rng, players, 2);
  QuadraticGame game = testing::RandomGame(rng, dims, zero_fraction);
  return BuildGameGraph(game, testing::RandomStepSizes(rng, players, 0.05, 0.3));
}

std::vector<Vector> RandomSignal(Rng& rng, int steps, int dim) {
  std::vector<Vector> values;
  for (int k = 0; k < steps; ++k) values.push_back(testing::RandomVector(rng, dim));
  return values;
}

struct TugOfWar {
  LQGameSpec spec;
  LiftedLQGame lifted;
  GameGraph graph;
  Vector x0;
};

TugOfWar MakeTugOfWar(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> targets;
  LQGameSpec spec = testing::TugOfWarSpec(testing::RandomVector(rng, 2), {});
  for (const Matrix& b : spec.inputs) targets.push_back(5.0 * b.col(0));
  spec.targets = targets;
  LiftedLQGame lifted = Lift(spec);
  const double gamma = UniformStepSize(GameJacobian(lifted.game)).gamma;
  GameGraph graph = BuildGameGraph(lifted.game, StepSizes::Uniform(4, gamma));
  const Vector x0 = Vector::Zero(lifted.game.dims().total());
  return {spec, std::move(lifted), std::move(graph), x0};
}

TEST(RunTest, MatchesClosedForm) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    GameGraph g = RandomGraph(rng);
    const Vector x0 = testing::RandomVector(rng, g.dims().total());
    const Trajectory t = decouple::Run(g, x0, 5, DisturbanceSignal::None());
    ASSERT_EQ(t.steps(), 5);
    ASSERT_EQ(t.iterates().size(), 6u);
    for (int k = 0; k <= 5; ++k) {
      const Vector want = testing::ClosedFormIterate(g.adjacency(), g.offset(), x0, k);
      EXPECT_LE((t.iterate(k) - want).norm(), 1e-12 * std::max(1.0, want.norm()));
    }
  }
}

TEST(RunTest, OneStepIsExact) {
  Rng rng(2);
  GameGraph g = RandomGraph(rng);
  const Vector x0 = testing::RandomVector(rng, g.dims().total());
  const Trajectory t = decouple::Run(g, x0, 1, DisturbanceSignal::None());
  const Vector want = g.adjacency() * x0 - g.offset();
  EXPECT_EQ(t.iterate(1), want);
  EXPECT_EQ(t.iterate(0), x0);
}

TEST(RunTest, ZeroStepsAndErrors) {
  Rng rng(3);
  GameGraph g = RandomGraph(rng);
  const Vector x0 = Vector::Zero(g.dims().total());
  EXPECT_EQ(decouple::Run(g, x0, 0, DisturbanceSignal::None()).steps(), 0);
  EXPECT_THROW(decouple::Run(g, x0, -1, DisturbanceSignal::None()), Error);
  EXPECT_THROW(decouple::Run(g, Vector::Zero(x0.size() + 1), 3, DisturbanceSignal::None()), Error);
  EXPECT_THROW(decouple::Run(g, x0, 3, DisturbanceSignal::None(g.dims().num_players())), Error);
  EXPECT_THROW(DisturbanceSignal(0, DisturbanceSignal::SeededUniform{1, -1.0}), Error);
}

TEST(DisturbanceTest, JointIsZeroOutsideSource) {
  Rng rng(4);
  const PlayerDims dims({2, 1, 3});
  const DisturbanceSignal d(2, DisturbanceSignal::SeededUniform{9, 4.0});
  for (int k = 0; k < 20; ++k) {
    const Vector joint = d.Joint(k, dims);
    EXPECT_EQ(joint.head(3).norm(), 0.0);
    EXPECT_GT(joint.tail(3).norm(), 0.0);
  }
  const DisturbanceSignal impulse(0, DisturbanceSignal::Impulse{3, Vector::Ones(2)});
  EXPECT_EQ(impulse.Joint(2, dims).norm(), 0.0);
  EXPECT_EQ(impulse.Joint(3, dims).head(2), Vector::Ones(2));
  const DisturbanceSignal bad(0, DisturbanceSignal::Constant{Vector::Ones(3)});
  EXPECT_THROW(bad.Joint(0, dims), Error);
}

TEST(DisturbanceTest, SampleBallStaysInBallAndIsDeterministic) {
  for (int dim = 1; dim <= 4; ++dim) {
    double largest = 0.0;
    for (int k = 0; k < 500; ++k) {
      const Vector v = SampleBall(17, k, 2.5, dim);
      ASSERT_EQ(v.size(), dim);
      EXPECT_LE(v.norm(), 2.5);
      largest = std::max(largest, v.norm());
      EXPECT_EQ(v, SampleBall(17, k, 2.5, dim));
    }
    EXPECT_GT(largest, 2.0);
  }
  EXPECT_NE(SampleBall(17, 0, 1.0, 2), SampleBall(17, 1, 1.0, 2));
  EXPECT_NE(SampleBall(17, 0, 1.0, 2), SampleBall(18, 0, 1.0, 2));
  EXPECT_EQ(SampleBall(17, 0, 0.0, 3), Vector::Zero(3));
}

TEST(CompareTest, ZeroDisturbanceGivesZeroDeviation) {
  Rng rng(5);
  GameGraph g = RandomGraph(rng);
  const Vector x0 = testing::RandomVector(rng, g.dims().total());
  const DeviationReport r = Compare(g, x0, 40, DisturbanceSignal::None(1));
  EXPECT_FALSE(r.diverged);
  EXPECT_EQ(r.compared_iterates, 41);
  for (const auto& p : r.players) {
    EXPECT_EQ(p.max_deviation, 0.0);
    EXPECT_EQ(p.relative_deviation, 0.0);
  }
}

// y^k - x^k = -sum_{l<k} W^{k-1-l} Gamma d^l.
TEST(CompareTest, DeviationIsLinearInDisturbance) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    GameGraph g = RandomGraph(rng);
    const PlayerDims& dims = g.dims();
    const int player = testing::UniformInt(rng, 0, dims.num_players() - 1);
    const Vector x0 = testing::RandomVector(rng, dims.total());
    const int steps = 12;
    const DisturbanceSignal signal(
        player, DisturbanceSignal::Explicit{RandomSignal(rng, steps, dims.dim(player))});
    const Trajectory clean = decouple::Run(g, x0, steps, DisturbanceSignal::None(player));
    const Trajectory dirty = decouple::Run(g, x0, steps, signal);
    const Vector gamma = g.gamma().Expand(dims);
    for (int k = 0; k <= steps; ++k) {
      Vector want = Vector::Zero(dims.total());
      for (int l = 0; l < k; ++l) {
        want -= testing::MatrixPower(g.adjacency(), k - 1 - l) *
                gamma.cwiseProduct(signal.Joint(l, dims));
      }
      const Vector got = dirty.iterate(k) - clean.iterate(k);
      EXPECT_LE((got - want).norm(), 1e-12 * std::max(1.0, want.norm())) << "k=" << k;
      if (k < steps) EXPECT_EQ(dirty.disturbances()[k], signal.Joint(k, dims));
    }
  }
}

TEST(CompareTest, Superposition) {
  Rng rng(7);
  GameGraph g = RandomGraph(rng);
  const PlayerDims& dims = g.dims();
  const Vector x0 = testing::RandomVector(rng, dims.total());
  const int steps = 15;
  const auto d1 = RandomSignal(rng, steps, dims.dim(0));
  const auto d2 = RandomSignal(rng, steps, dims.dim(0));
  std::vector<Vector> sum;
  for (int k = 0; k < steps; ++k) sum.push_back(d1[k] + d2[k]);
  auto deviation = [&](const std::vector<Vector>& d, int k) {
    const Trajectory clean = decouple::Run(g, x0, steps, DisturbanceSignal::None(0));
    const Trajectory dirty = decouple::Run(g, x0, steps, {0, DisturbanceSignal::Explicit{d}});
    return Vector(dirty.iterate(k) - clean.iterate(k));
  };
  for (int k = 0; k <= steps; ++k) {
    const Vector both = deviation(sum, k);
    const Vector separate = deviation(d1, k) + deviation(d2, k);
    EXPECT_LE((both - separate).norm(), 1e-12 * std::max(1.0, both.norm()));
  }
}

TEST(CompareTest, SeededRunsAreBitwiseIdentical) {
  Rng rng(8);
  GameGraph g = RandomGraph(rng);
  const Vector x0 = testing::RandomVector(rng, g.dims().total());
  const DisturbanceSignal signal(1, DisturbanceSignal::SeededUniform{42, 3.0});
  const Trajectory a = decouple::Run(g, x0, 60, signal);
  const Trajectory b = decouple::Run(g, x0, 60, signal);
  for (int k = 0; k <= 60; ++k) EXPECT_EQ(a.iterate(k), b.iterate(k));
  const DisturbanceSignal other(1, DisturbanceSignal::SeededUniform{43, 3.0});
  EXPECT_NE(decouple::Run(g, x0, 60, other).iterate(60), a.iterate(60));
}

TEST(CompareTest, DecoupledTargetIgnoresDisturbances) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const GameGraph g = testing::RandomExampleOne(rng, false);
    ASSERT_TRUE(CheckAlgebraic(g, {0, 3}).decoupled);
    const Vector x0 = testing::RandomVector(rng, 4);
    const DeviationReport impulse =
        Compare(g, x0, 100, {0, DisturbanceSignal::Impulse{0, Vector::Ones(1)}});
    const DeviationReport random =
        Compare(g, x0, 100, {0, DisturbanceSignal::SeededUniform{std::uint64_t(trial), 5.0}});
    EXPECT_LE(impulse.players[3].relative_deviation, 1e-8);
    EXPECT_LE(random.players[3].relative_deviation, 1e-8);
    EXPECT_GT(random.players[1].max_deviation, 0.0);
  }
}

TEST(CompareTest, CoupledTargetMovesUnderAlignedImpulse) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const GameGraph g = testing::RandomExampleOne(rng, true);
    const DecouplingReport r = CheckAlgebraic(g, {0, 3});
    ASSERT_FALSE(r.decoupled);
    const int k = r.FirstFailingPower();
    const Vector e = testing::AlignedImpulse(g.adjacency(), g.dims(), 0, 3, k);
    const DeviationReport dev =
        Compare(g, Vector::Zero(4), k + 1, {0, DisturbanceSignal::Impulse{0, e}});
    EXPECT_GT(dev.players[3].relative_deviation, 1e-9);
  }
}

TEST(CompareTest, DivergenceKeepsPartialTrajectory) {
  const PlayerDims dims = PlayerDims::Scalar(2);
  const GameGraph g(dims, 1e200 * Matrix::Identity(2, 2), StepSizes::Uniform(2, 1.0),
                    Vector::Zero(2));
  try {
    decouple::Run(g, Vector::Ones(2), 10, DisturbanceSignal::None());
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
    EXPECT_EQ(e.step(), 2);
    EXPECT_EQ(e.partial().steps(), 1);
    EXPECT_TRUE(e.partial().iterate(1).allFinite());
  }

  // Only the corrupted run blows up; deviations cover the finite prefix.
  const GameGraph calm(dims, 0.5 * Matrix::Identity(2, 2), StepSizes::Uniform(2, 1.0),
                       Vector::Zero(2));
  const double inf = std::numeric_limits<double>::infinity();
  const DeviationReport r = Compare(calm, Vector::Ones(2), 10,
                                    {0, DisturbanceSignal::Impulse{3, Vector::Constant(1, inf)}});
  EXPECT_TRUE(r.diverged);
  EXPECT_EQ(r.compared_iterates, 4);
  EXPECT_EQ(r.players[0].max_deviation, 0.0);
}

TEST(SweepTest, ZeroBoundGivesZeroReport) {
  Rng rng(11);
  GameGraph g = RandomGraph(rng);
  const auto points = MagnitudeSweep(g, testing::RandomVector(rng, g.dims().total()), 50, 0,
                                     {0.0}, 3);
  ASSERT_EQ(points.size(), 1u);
  for (const auto& p : points[0].report.players) EXPECT_EQ(p.max_deviation, 0.0);
}

TEST(SweepTest, TugOfWar) {
  const TugOfWar tug = MakeTugOfWar(7);
  const PlayerCostFn cost = [&tug](int i, const Vector& u) { return tug.lifted.Cost(i, u); };
  const auto points = MagnitudeSweep(tug.graph, tug.x0, 100, 0, {1.0, 10.0, 50.0}, 7, cost);
  ASSERT_EQ(points.size(), 3u);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const DeviationReport& r = points[p].report;
    EXPECT_FALSE(r.diverged);
    EXPECT_LE(r.players[3].relative_deviation, 1e-8);
    EXPECT_GT(r.players[0].max_deviation, 0.0);
    if (p > 0) {
      EXPECT_GE(r.players[0].max_deviation, points[p - 1].report.players[0].max_deviation);
    }
  }
  // Player 4's action is untouched, its cost is not.
  const DeviationReport& big = points[2].report;
  ASSERT_EQ(big.clean_costs.cols(), 101);
  EXPECT_GT((big.clean_costs.row(3) - big.corrupted_costs.row(3)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SweepTest, ThreadCountDoesNotChangeResults) {
  const TugOfWar tug = MakeTugOfWar(3);
  const std::vector<double> bounds = {0.5, 1, 2, 4, 8, 16};
  const auto serial = MagnitudeSweep(tug.graph, tug.x0, 60, 1, bounds, 11, {}, 1);
  const auto parallel = MagnitudeSweep(tug.graph, tug.x0, 60, 1, bounds, 11, {}, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t p = 0; p < serial.size(); ++p) {
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(serial[p].report.players[i].max_deviation,
                parallel[p].report.players[i].max_deviation);
    }
  }
}

TEST(SweepTest, CoupledTargetMovesAtEveryPositiveBound) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    GameGraph g = RandomGraph(rng, 0.0);
    const auto points = MagnitudeSweep(g, Vector::Zero(g.dims().total()), 30, 0,
                                       {0.1, 1.0, 10.0}, 5);
    for (const auto& p : points) EXPECT_GT(p.report.players[1].max_deviation, 0.0);
  }
}

TEST(SweepTest, RejectsBadBounds) {
  Rng rng(13);
  GameGraph g = RandomGraph(rng);
  const Vector x0 = Vector::Zero(g.dims().total());
  EXPECT_THROW(MagnitudeSweep(g, x0, 5, 0, {2.0, 1.0}, 1), Error);
  EXPECT_THROW(MagnitudeSweep(g, x0, 5, 0, {-1.0}, 1), Error);
}

}  // namespace
}  // namespace decouple
