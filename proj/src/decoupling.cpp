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
#include <cmath>
#include <sstream>
#include <string>

namespace decouple {

const char* MethodName(Method method) {
  switch (method) {
    case Method::kAlgebraic:
      return "algebraic";
    case Method::kPathEnumeration:
      return "path-enumeration";
    case Method::kExact:
      return "exact";
  }
  return "unknown";
}

bool IsNegligible(double residual, double normalizer, double tolerance) {
  return residual <= tolerance * std::max(1.0, normalizer);
}

int DecouplingReport::FirstFailingPower() const {
  const double tol = method == Method::kExact ? 0.0 : query.tolerance;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    if (!IsNegligible(residuals[k], normalizers[k], tol)) {
      return static_cast<int>(k) + 1;
    }
  }
  return 0;
}

namespace {

void ValidateQuery(const GameGraph& graph, const DecouplingQuery& query) {
  const int n = graph.num_players();
  auto in_range = [n](int p) { return p >= 0 && p < n; };
  if (!in_range(query.source) || !in_range(query.target)) {
    throw Error(ErrorCode::kInvalidArgument,
                "pair (" + std::to_string(query.source) + ", " +
                    std::to_string(query.target) + ") out of range for " +
                    std::to_string(n) + " players");
  }
  if (query.source == query.target) {
    throw Error(ErrorCode::kInvalidArgument,
                "source and target coincide; a player always sees its own "
                "disturbance");
  }
  if (!(query.tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must be nonnegative");
  }
}

void Finalize(DecouplingReport& report) {
  report.decoupled = report.FirstFailingPower() == 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Algebraic test

std::vector<DecouplingReport> AllPairsReport(const GameGraph& graph,
                                             double tolerance) {
  const PlayerDims& dims = graph.dims();
  const int players = dims.num_players();
  const int n = dims.total();
  std::vector<DecouplingReport> reports;
  for (int i = 0; i < players; ++i) {
    for (int j = 0; j < players; ++j) {
      if (i == j) continue;
      DecouplingQuery query{i, j, tolerance};
      ValidateQuery(graph, query);
      DecouplingReport report;
      report.query = query;
      report.method = Method::kAlgebraic;
      report.residuals.reserve(n - 1);
      report.normalizers.reserve(n - 1);
      reports.push_back(std::move(report));
    }
  }

  const Matrix& w = graph.adjacency();
  Matrix power = w;
  Matrix next(n, n);
  for (int k = 1; k < n; ++k) {
    if (k > 1) {
      next.noalias() = w * power;
      power.swap(next);
    }
    const double normalizer = power.norm();
    for (DecouplingReport& report : reports) {
      const int i = report.query.source;
      const int j = report.query.target;
      report.residuals.push_back(
          power.block(dims.offset(j), dims.offset(i), dims.dim(j), dims.dim(i)).norm());
      report.normalizers.push_back(normalizer);
    }
  }
  for (DecouplingReport& report : reports) Finalize(report);
  return reports;
}

DecouplingReport CheckAlgebraic(const GameGraph& graph, const DecouplingQuery& query) {
  ValidateQuery(graph, query);
  const PlayerDims& dims = graph.dims();
  const int n = dims.total();
  const int i = query.source;
  const int j = query.target;

  DecouplingReport report;
  report.query = query;
  report.method = Method::kAlgebraic;
  report.residuals.reserve(n - 1);
  report.normalizers.reserve(n - 1);

  // The source selector E and the target-complement Y are coordinate
  // selections, so im(W^k E) in im(Y) is just the (j, i) block of W^k.
  const Matrix& w = graph.adjacency();
  Matrix power = w;
  Matrix next(n, n);
  for (int k = 1; k < n; ++k) {
    if (k > 1) {
      next.noalias() = w * power;
      power.swap(next);
    }
    report.residuals.push_back(
        power.block(dims.offset(j), dims.offset(i), dims.dim(j), dims.dim(i)).norm());
    report.normalizers.push_back(power.norm());
  }
  Finalize(report);
  return report;
}

// ---------------------------------------------------------------------------
// Path enumeration

namespace {

std::vector<std::vector<int>> Successors(const GameGraph& graph, EdgePolicy policy,
                                         double edge_zero_tol) {
  const int players = graph.num_players();
  std::vector<std::vector<int>> next(players);
  for (int from = 0; from < players; ++from) {
    for (int to = 0; to < players; ++to) {
      if (policy == EdgePolicy::kComplete || graph.HasEdge(from, to, edge_zero_tol)) {
        next[from].push_back(to);
      }
    }
  }
  return next;
}

std::string CapMessage(double estimate, std::int64_t cap) {
  std::ostringstream os;
  os << "path enumeration needs about " << estimate << " extensions, cap is "
     << cap << "; use the algebraic test";
  return os.str();
}

// Depth-first walk from a fixed source. sums[k][v] accumulates the weights of
// all length-k paths ending at v.
class PathWalker {
 public:
  PathWalker(const GameGraph& graph, const std::vector<std::vector<int>>& next,
             int source, int max_length)
      : graph_(graph), next_(next), source_(source), max_length_(max_length) {
    const PlayerDims& dims = graph.dims();
    sums_.resize(max_length_ + 1);
    for (auto& row : sums_) {
      row.reserve(dims.num_players());
      for (int v = 0; v < dims.num_players(); ++v) {
        row.push_back(Matrix::Zero(dims.dim(v), dims.dim(source)));
      }
    }
    products_.resize(max_length_ + 1);
    for (int v = 0; v < dims.num_players(); ++v) {
      for (int u = 0; u < dims.num_players(); ++u) {
        blocks_.push_back(graph.Block(v, u));
      }
    }
  }

  void Run() {
    const int ns = graph_.dims().dim(source_);
    products_[0] = Matrix::Identity(ns, ns);
    Extend(source_, 0);
  }

  const Matrix& Sum(int length, int node) const { return sums_[length][node]; }
  std::int64_t extensions() const { return extensions_; }

 private:
  void Extend(int node, int depth) {
    if (depth == max_length_) return;
    const int players = graph_.num_players();
    for (int to : next_[node]) {
      ++extensions_;
      Matrix& product = products_[depth + 1];
      product.noalias() = blocks_[to * players + node] * products_[depth];
      sums_[depth + 1][to] += product;
      Extend(to, depth + 1);
    }
  }

  const GameGraph& graph_;
  const std::vector<std::vector<int>>& next_;
  int source_;
  int max_length_;
  std::vector<Matrix> blocks_;
  std::vector<Matrix> products_;
  std::vector<std::vector<Matrix>> sums_;
  std::int64_t extensions_ = 0;
};

std::vector<double> PowerNorms(const Matrix& w, int max_power) {
  std::vector<double> norms;
  norms.reserve(max_power);
  Matrix power = w;
  for (int k = 1; k <= max_power; ++k) {
    if (k > 1) power = (w * power).eval();
    norms.push_back(power.norm());
  }
  return norms;
}

}  // namespace

double EstimatePathExtensions(const GameGraph& graph, int source, double edge_zero_tol) {
  const int players = graph.num_players();
  const auto next = Successors(graph, EdgePolicy::kNonzeroBlocks, edge_zero_tol);
  std::vector<double> walks(players, 0.0);
  walks[source] = 1.0;
  double total = 0.0;
  for (int k = 1; k < graph.total_dim(); ++k) {
    std::vector<double> stepped(players, 0.0);
    for (int from = 0; from < players; ++from) {
      for (int to : next[from]) stepped[to] += walks[from];
    }
    walks.swap(stepped);
    for (double w : walks) total += w;
  }
  return total;
}

PathSet EnumeratePaths(const GameGraph& graph, int source, int target, int length,
                       EdgePolicy policy, double edge_zero_tol, std::int64_t cap) {
  const int players = graph.num_players();
  if (source < 0 || source >= players || target < 0 || target >= players) {
    throw Error(ErrorCode::kInvalidArgument, "path endpoint out of range");
  }
  if (length < 1) {
    throw Error(ErrorCode::kInvalidArgument, "path length must be >= 1");
  }
  const auto next = Successors(graph, policy, edge_zero_tol);
  PathSet set;
  set.source = source;
  set.target = target;
  set.length = length;
  set.weight_sum = Matrix::Zero(graph.dims().dim(target), graph.dims().dim(source));

  std::vector<int> nodes{source};
  std::int64_t visited = 0;
  auto walk = [&](auto&& self, int node) -> void {
    if (static_cast<int>(nodes.size()) == length + 1) {
      if (node != target) return;
      Matrix weight = Matrix::Identity(graph.dims().dim(source), graph.dims().dim(source));
      for (int l = 0; l < length; ++l) {
        weight = (graph.Block(nodes[l + 1], nodes[l]) * weight).eval();
      }
      set.weight_sum += weight;
      set.paths.push_back(nodes);
      return;
    }
    for (int to : next[node]) {
      if (++visited > cap) {
        throw Error(ErrorCode::kEnumerationCapExceeded,
                    CapMessage(static_cast<double>(visited), cap));
      }
      nodes.push_back(to);
      self(self, to);
      nodes.pop_back();
    }
  };
  walk(walk, source);
  return set;
}

std::vector<DecouplingReport> CheckPathsFromSource(const GameGraph& graph, int source,
                                                   double tolerance,
                                                   double edge_zero_tol,
                                                   std::int64_t cap) {
  const int players = graph.num_players();
  const int n = graph.total_dim();
  for (int target = 0; target < players; ++target) {
    if (target != source) ValidateQuery(graph, {source, target, tolerance});
  }
  if (players < 2) ValidateQuery(graph, {source, source, tolerance});

  const double estimate = EstimatePathExtensions(graph, source, edge_zero_tol);
  if (estimate > static_cast<double>(cap)) {
    throw Error(ErrorCode::kEnumerationCapExceeded, CapMessage(estimate, cap));
  }

  const auto next = Successors(graph, EdgePolicy::kNonzeroBlocks, edge_zero_tol);
  PathWalker walker(graph, next, source, n - 1);
  walker.Run();
  const std::vector<double> norms = PowerNorms(graph.adjacency(), n - 1);

  std::vector<DecouplingReport> reports;
  for (int target = 0; target < players; ++target) {
    if (target == source) continue;
    DecouplingReport report;
    report.query = {source, target, tolerance};
    report.method = Method::kPathEnumeration;
    for (int k = 1; k < n; ++k) {
      report.residuals.push_back(walker.Sum(k, target).norm());
    }
    report.normalizers = norms;
    Finalize(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

DecouplingReport CheckPaths(const GameGraph& graph, const DecouplingQuery& query,
                            double edge_zero_tol, std::int64_t cap) {
  ValidateQuery(graph, query);
  auto reports =
      CheckPathsFromSource(graph, query.source, query.tolerance, edge_zero_tol, cap);
  for (DecouplingReport& report : reports) {
    if (report.query.target == query.target) return report;
  }
  throw Error(ErrorCode::kInvalidArgument, "target not found");  // unreachable
}

// ---------------------------------------------------------------------------
// Potential games

std::vector<SymmetryVerdict> CheckPotentialSymmetry(const QuadraticGame& game,
                                                    const StepSizes& gamma,
                                                    double tolerance) {
  const int players = game.num_players();
  for (int i = 0; i < players; ++i) {
    for (int j = 0; j < players; ++j) {
      if (i == j) continue;
      const Matrix& pij = game.Cross(i, j);
      const double gap = (pij - game.Cross(j, i).transpose()).norm();
      if (gap > tolerance * std::max(1.0, pij.norm())) {
        std::ostringstream os;
        os << "P_" << i << "," << j << " differs from P_" << j << "," << i
           << "^T by " << gap << "; not a potential game";
        throw Error(ErrorCode::kNotPotentialGame, os.str());
      }
    }
  }
  const GameGraph graph = BuildGameGraph(game, gamma);
  const auto reports = AllPairsReport(graph, tolerance);
  auto verdict = [&](int source, int target) {
    for (const auto& r : reports) {
      if (r.query.source == source && r.query.target == target) return r.decoupled;
    }
    return false;
  };
  std::vector<SymmetryVerdict> out;
  for (int i = 0; i < players; ++i) {
    for (int j = i + 1; j < players; ++j) {
      out.push_back({i, j, verdict(i, j), verdict(j, i)});
    }
  }
  return out;
}

}  // namespace decouple
