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

#include "decouple/problem.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace decouple {

const char* ProblemKindName(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kQuadratic:
      return "quadratic";
    case ProblemKind::kLQ:
      return "lq";
    case ProblemKind::kBilinear:
      return "bilinear";
  }
  return "unknown";
}

std::string FormatDouble(double value) {
  char buf[32];
  // Adding zero folds -0 into 0.
  std::snprintf(buf, sizeof(buf), "%.17g", value + 0.0);
  return buf;
}

PlayerCostFn Problem::CostFunction() const {
  if (lifted) {
    auto lifted_game = std::make_shared<const LiftedLQGame>(*lifted);
    return [lifted_game](int player, const Vector& x) {
      return lifted_game->Cost(player, x);
    };
  }
  auto g = std::make_shared<const QuadraticGame>(game);
  return [g](int player, const Vector& x) { return g->Cost(player, x); };
}

namespace {

// ---------------------------------------------------------------------------
// Reading

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Mark& mark, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    if (mark.line >= 0) os << ":" << mark.line + 1 << ":" << mark.column + 1;
    os << ": " << message;
    throw Error(ErrorCode::kParse, os.str());
  }
  [[noreturn]] void Fail(const YAML::Node& node, const std::string& message) const {
    Fail(node.Mark(), message);
  }

  double Number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) Fail(node, what + " must be a number");
    const std::string& text = node.Scalar();
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      Fail(node, what + ": '" + text + "' is not a number");
    }
    if (!std::isfinite(value)) Fail(node, what + " must be finite");
    return value;
  }

  long long Integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) Fail(node, what + " must be an integer");
    const std::string& text = node.Scalar();
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      Fail(node, what + ": '" + text + "' is not an integer");
    }
    return value;
  }

  Vector VectorOf(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) Fail(node, what + " must be a list of numbers");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t k = 0; k < node.size(); ++k) {
      v(k) = Number(node[k], what + "[" + std::to_string(k + 1) + "]");
    }
    return v;
  }

  Matrix MatrixOf(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() == 0) {
      Fail(node, "matrix " + what + " must be a nonempty list of rows");
    }
    std::size_t cols = 0;
    for (std::size_t r = 0; r < node.size(); ++r) {
      const YAML::Node row = node[r];
      if (!row.IsSequence()) {
        Fail(row, "matrix " + what + " row " + std::to_string(r + 1) +
                      " must be a list of numbers");
      }
      if (r == 0) {
        cols = row.size();
        if (cols == 0) Fail(row, "matrix " + what + " has an empty row");
      } else if (row.size() != cols) {
        Fail(row, "matrix " + what + " is ragged: row " + std::to_string(r + 1) +
                      " has " + std::to_string(row.size()) + " entries, row 1 has " +
                      std::to_string(cols));
      }
    }
    Matrix m(static_cast<Eigen::Index>(node.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < node.size(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        m(r, c) = Number(node[r][c], what + "(" + std::to_string(r + 1) + "," +
                                         std::to_string(c + 1) + ")");
      }
    }
    return m;
  }

  void RequireShape(const YAML::Node& node, const Matrix& m, Eigen::Index rows,
                    Eigen::Index cols, const std::string& what) const {
    if (m.rows() != rows || m.cols() != cols) {
      Fail(node, "block " + what + " is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                     "x" + std::to_string(cols));
    }
  }

  void RejectUnknownKeys(const YAML::Node& root, const std::set<std::string>& allowed,
                         const std::string& kind) const {
    for (const auto& entry : root) {
      const std::string key = entry.first.as<std::string>();
      if (!allowed.count(key)) {
        Fail(entry.first, "unknown key '" + key + "' for kind " + kind);
      }
    }
  }

  YAML::Node Require(const YAML::Node& root, const char* key) const {
    const YAML::Node node = root[key];
    if (!node) Fail(root, std::string("missing required key '") + key + "'");
    return node;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

struct Shared {
  std::optional<std::vector<double>> gamma;  // nullopt means uniform
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  std::optional<Vector> x0;
  YAML::Node x0_node;
  YAML::Node gamma_node;
};

Shared ReadShared(const Reader& reader, const YAML::Node& root, bool allow_gamma) {
  Shared shared;
  if (const YAML::Node g = root["gamma"]) {
    if (!allow_gamma) reader.Fail(g, "use gamma1/gamma2 for bilinear games");
    shared.gamma_node = g;
    if (g.IsScalar() && g.Scalar() == "uniform") {
      shared.gamma.reset();
    } else {
      const Vector v = reader.VectorOf(g, "gamma");
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (!(v(k) > 0.0)) reader.Fail(g[k], "step sizes must be positive");
      }
      shared.gamma = std::vector<double>(v.data(), v.data() + v.size());
    }
  }
  if (const YAML::Node t = root["tolerance"]) {
    shared.tolerance = reader.Number(t, "tolerance");
    if (shared.tolerance < 0.0) reader.Fail(t, "tolerance must be nonnegative");
  }
  if (const YAML::Node s = root["seed"]) {
    const long long seed = reader.Integer(s, "seed");
    if (seed < 0) reader.Fail(s, "seed must be nonnegative");
    shared.seed = static_cast<std::uint64_t>(seed);
  }
  if (const YAML::Node x = root["x0"]) {
    shared.x0 = reader.VectorOf(x, "x0");
    shared.x0_node = x;
  }
  return shared;
}

// Resolves step sizes and builds the graph; fills step_rule for "uniform".
GameGraph ResolveGraph(const Reader& reader, const Shared& shared,
                       const QuadraticGame& game, std::optional<StepSizeRule>& rule) {
  const int players = game.num_players();
  if (shared.gamma) {
    if (static_cast<int>(shared.gamma->size()) != players) {
      reader.Fail(shared.gamma_node, "gamma lists " + std::to_string(shared.gamma->size()) +
                                         " step sizes for " + std::to_string(players) +
                                         " players");
    }
    return BuildGameGraph(game, StepSizes(*shared.gamma));
  }
  rule = UniformStepSize(GameJacobian(game));
  return BuildGameGraph(game, StepSizes::Uniform(players, rule->gamma));
}

Vector ResolveX0(const Reader& reader, const Shared& shared, int total) {
  if (!shared.x0) return Vector::Zero(total);
  if (shared.x0->size() != total) {
    reader.Fail(shared.x0_node, "x0 has length " + std::to_string(shared.x0->size()) +
                                    ", expected " + std::to_string(total));
  }
  return *shared.x0;
}

// Parses "i" or "i,j" (1-based) into 0-based indices.
std::pair<int, int> BlockKey(const Reader& reader, const YAML::Node& key_node,
                             int players) {
  const std::string key = key_node.as<std::string>();
  auto parse = [&](std::string_view part) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      reader.Fail(key_node, "P key '" + key + "' must be \"i\" or \"i,j\"");
    }
    if (value < 1 || value > players) {
      reader.Fail(key_node, "P key '" + key + "' refers to undeclared player " +
                                std::to_string(value));
    }
    return value - 1;
  };
  const auto comma = key.find(',');
  if (comma == std::string::npos) {
    const int i = parse(key);
    return {i, i};
  }
  const int i = parse(std::string_view(key).substr(0, comma));
  const int j = parse(std::string_view(key).substr(comma + 1));
  if (i == j) reader.Fail(key_node, "P key '" + key + "' repeats a player; use \"i\"");
  return {i, j};
}

Problem ParseQuadratic(const Reader& reader, const YAML::Node& root) {
  reader.RejectUnknownKeys(root, {"kind", "dims", "P", "r", "gamma", "tolerance", "seed", "x0"},
                           "quadratic");
  const YAML::Node dims_node = reader.Require(root, "dims");
  if (!dims_node.IsSequence() || dims_node.size() == 0) {
    reader.Fail(dims_node, "dims must be a nonempty list of positive integers");
  }
  std::vector<int> dims;
  for (std::size_t k = 0; k < dims_node.size(); ++k) {
    const long long d = reader.Integer(dims_node[k], "dims[" + std::to_string(k + 1) + "]");
    if (d < 1) reader.Fail(dims_node[k], "player dimensions must be >= 1");
    dims.push_back(static_cast<int>(d));
  }
  QuadraticGame game{PlayerDims(dims)};
  const int players = game.num_players();

  const YAML::Node p_node = reader.Require(root, "P");
  if (!p_node.IsMap()) reader.Fail(p_node, "P must map \"i\" / \"i,j\" to matrices");
  std::vector<bool> has_self(players, false);
  for (const auto& entry : p_node) {
    const auto [i, j] = BlockKey(reader, entry.first, players);
    const std::string name = "P[" + entry.first.as<std::string>() + "]";
    const Matrix block = reader.MatrixOf(entry.second, name);
    reader.RequireShape(entry.second, block, dims[i], dims[j], name);
    if (i == j) {
      game.SetSelf(i, block);
      has_self[i] = true;
    } else {
      game.SetCross(i, j, block);
    }
  }
  for (int i = 0; i < players; ++i) {
    if (!has_self[i]) {
      reader.Fail(p_node, "P is missing the self block \"" + std::to_string(i + 1) + "\"");
    }
  }
  if (const YAML::Node r_node = root["r"]) {
    if (!r_node.IsSequence() || static_cast<int>(r_node.size()) != players) {
      reader.Fail(r_node, "r must list one vector per player");
    }
    for (int i = 0; i < players; ++i) {
      const std::string name = "r[" + std::to_string(i + 1) + "]";
      const Vector r = reader.VectorOf(r_node[i], name);
      if (r.size() != dims[i]) {
        reader.Fail(r_node[i], name + " has length " + std::to_string(r.size()) +
                                   ", expected " + std::to_string(dims[i]));
      }
      game.SetOffset(i, r);
    }
  }

  const Shared shared = ReadShared(reader, root, true);
  std::optional<StepSizeRule> rule;
  GameGraph graph = ResolveGraph(reader, shared, game, rule);
  Vector x0 = ResolveX0(reader, shared, game.dims().total());
  return Problem{ProblemKind::kQuadratic, std::move(game), std::move(graph),
                 std::nullopt, std::nullopt, std::nullopt, rule,
                 shared.tolerance, shared.seed, std::move(x0)};
}

std::vector<Matrix> MatrixList(const Reader& reader, const YAML::Node& node,
                               const std::string& name) {
  if (!node.IsSequence() || node.size() == 0) {
    reader.Fail(node, name + " must be a nonempty list of matrices");
  }
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(reader.MatrixOf(node[k], name + "[" + std::to_string(k + 1) + "]"));
  }
  return out;
}

Problem ParseLQ(const Reader& reader, const YAML::Node& root) {
  reader.RejectUnknownKeys(root,
                           {"kind", "A", "B", "Q", "R", "T", "z0", "targets", "gamma",
                            "tolerance", "seed", "x0"},
                           "lq");
  LQGameSpec spec;
  const YAML::Node a_node = reader.Require(root, "A");
  spec.dynamics = reader.MatrixOf(a_node, "A");
  const auto m = spec.dynamics.rows();
  reader.RequireShape(a_node, spec.dynamics, m, m, "A");

  const YAML::Node b_node = reader.Require(root, "B");
  spec.inputs = MatrixList(reader, b_node, "B");
  const int players = spec.num_players();
  for (int i = 0; i < players; ++i) {
    if (spec.inputs[i].rows() != m) {
      reader.Fail(b_node[i], "block B[" + std::to_string(i + 1) + "] has " +
                                 std::to_string(spec.inputs[i].rows()) + " rows, expected " +
                                 std::to_string(m));
    }
  }
  const YAML::Node q_node = reader.Require(root, "Q");
  spec.state_costs = MatrixList(reader, q_node, "Q");
  const YAML::Node r_node = reader.Require(root, "R");
  spec.input_costs = MatrixList(reader, r_node, "R");
  if (static_cast<int>(spec.state_costs.size()) != players) {
    reader.Fail(q_node, "Q must list one matrix per player (" + std::to_string(players) + ")");
  }
  if (static_cast<int>(spec.input_costs.size()) != players) {
    reader.Fail(r_node, "R must list one matrix per player (" + std::to_string(players) + ")");
  }
  for (int i = 0; i < players; ++i) {
    const std::string tag = std::to_string(i + 1);
    reader.RequireShape(q_node[i], spec.state_costs[i], m, m, "Q[" + tag + "]");
    reader.RequireShape(r_node[i], spec.input_costs[i], spec.inputs[i].cols(),
                        spec.inputs[i].cols(), "R[" + tag + "]");
  }
  const YAML::Node t_node = reader.Require(root, "T");
  const long long horizon = reader.Integer(t_node, "T");
  if (horizon < 1 || horizon > 100000) reader.Fail(t_node, "T must be a positive integer");
  spec.horizon = static_cast<int>(horizon);
  const YAML::Node z_node = reader.Require(root, "z0");
  spec.initial_state = reader.VectorOf(z_node, "z0");
  if (spec.initial_state.size() != m) {
    reader.Fail(z_node, "z0 has length " + std::to_string(spec.initial_state.size()) +
                            ", expected " + std::to_string(m));
  }
  if (const YAML::Node c_node = root["targets"]) {
    if (!c_node.IsSequence() || static_cast<int>(c_node.size()) != players) {
      reader.Fail(c_node, "targets must list one point per player");
    }
    for (int i = 0; i < players; ++i) {
      spec.targets.push_back(
          reader.VectorOf(c_node[i], "targets[" + std::to_string(i + 1) + "]"));
      if (spec.targets.back().size() != m) {
        reader.Fail(c_node[i], "targets[" + std::to_string(i + 1) + "] must have length " +
                                   std::to_string(m));
      }
    }
  }
  try {
    spec.Validate();
  } catch (const Error& e) {
    reader.Fail(root, e.what());
  }

  LiftedLQGame lifted = Lift(spec);
  const Shared shared = ReadShared(reader, root, true);
  std::optional<StepSizeRule> rule;
  GameGraph graph = ResolveGraph(reader, shared, lifted.game, rule);
  Vector x0 = ResolveX0(reader, shared, lifted.game.dims().total());
  QuadraticGame game = lifted.game;
  return Problem{ProblemKind::kLQ, std::move(game), std::move(graph), std::move(spec),
                 std::move(lifted), std::nullopt, rule, shared.tolerance, shared.seed,
                 std::move(x0)};
}

Problem ParseBilinear(const Reader& reader, const YAML::Node& root) {
  // gamma passes here so that ReadShared can point at gamma1/gamma2.
  reader.RejectUnknownKeys(root,
                           {"kind", "A", "B", "gamma1", "gamma2", "mode", "tolerance",
                            "seed", "x0", "gamma"},
                           "bilinear");
  BilinearGameSpec spec;
  spec.payoff_first = reader.MatrixOf(reader.Require(root, "A"), "A");
  const YAML::Node b_node = reader.Require(root, "B");
  spec.payoff_second = reader.MatrixOf(b_node, "B");
  reader.RequireShape(b_node, spec.payoff_second, spec.payoff_first.cols(),
                      spec.payoff_first.rows(), "B");
  const YAML::Node g1 = reader.Require(root, "gamma1");
  const YAML::Node g2 = reader.Require(root, "gamma2");
  spec.gamma1 = reader.Number(g1, "gamma1");
  spec.gamma2 = reader.Number(g2, "gamma2");
  if (!(spec.gamma1 > 0.0)) reader.Fail(g1, "gamma1 must be positive");
  if (!(spec.gamma2 > 0.0)) reader.Fail(g2, "gamma2 must be positive");
  const YAML::Node mode = reader.Require(root, "mode");
  if (!mode.IsScalar()) reader.Fail(mode, "mode must be simultaneous or alternating");
  if (mode.Scalar() == "simultaneous") {
    spec.mode = PlayMode::kSimultaneous;
  } else if (mode.Scalar() == "alternating") {
    spec.mode = PlayMode::kAlternating;
  } else {
    reader.Fail(mode, "mode must be simultaneous or alternating, got '" + mode.Scalar() + "'");
  }
  const Shared shared = ReadShared(reader, root, false);
  GameGraph graph = BuildBilinearGraph(spec);
  QuadraticGame game = BilinearCoordinateGame(spec);
  Vector x0 = ResolveX0(reader, shared, graph.total_dim());
  return Problem{ProblemKind::kBilinear, std::move(game), std::move(graph), std::nullopt,
                 std::nullopt, std::move(spec), std::nullopt, shared.tolerance,
                 shared.seed, std::move(x0)};
}

// ---------------------------------------------------------------------------
// Writing

std::string Row(const Eigen::Ref<const Vector>& v) {
  std::string out = "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += FormatDouble(v(k));
  }
  return out + "]";
}

std::string FlowMatrix(const Matrix& m) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) out += ", ";
    out += Row(m.row(r).transpose());
  }
  return out + "]";
}

void EmitShared(std::ostringstream& os, const Problem& problem) {
  os << "tolerance: " << FormatDouble(problem.tolerance) << "\n";
  os << "seed: " << problem.seed << "\n";
  os << "x0: " << Row(problem.x0) << "\n";
}

}  // namespace

Problem ParseProblem(std::string_view text, std::string_view source_name) {
  const Reader reader{std::string(source_name)};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    reader.Fail(e.mark, e.msg);
  }
  if (!root.IsMap()) reader.Fail(root, "document must be a mapping with a 'kind' key");
  try {
    const YAML::Node kind = reader.Require(root, "kind");
    if (!kind.IsScalar()) reader.Fail(kind, "kind must be quadratic, lq or bilinear");
    if (kind.Scalar() == "quadratic") return ParseQuadratic(reader, root);
    if (kind.Scalar() == "lq") return ParseLQ(reader, root);
    if (kind.Scalar() == "bilinear") return ParseBilinear(reader, root);
    reader.Fail(kind, "unknown kind '" + kind.Scalar() + "' (quadratic, lq, bilinear)");
  } catch (const YAML::Exception& e) {
    reader.Fail(e.mark, e.msg);
  }
}

Problem LoadProblem(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    return ParseProblem(text, "<stdin>");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "failed reading '" + path + "'");
  return ParseProblem(text, path);
}

std::string EmitGameDocument(const Problem& problem) {
  const QuadraticGame& game = problem.game;
  const PlayerDims& dims = game.dims();
  std::ostringstream os;
  os << "kind: quadratic\n";
  os << "dims: [";
  for (int i = 0; i < dims.num_players(); ++i) os << (i ? ", " : "") << dims.dim(i);
  os << "]\n";
  os << "gamma: " << Row(Eigen::Map<const Vector>(problem.graph.gamma().values().data(),
                                                  dims.num_players()))
     << "\n";
  EmitShared(os, problem);
  os << "P:\n";
  for (int i = 0; i < dims.num_players(); ++i) {
    os << "  \"" << i + 1 << "\": " << FlowMatrix(game.Self(i)) << "\n";
    for (int j = 0; j < dims.num_players(); ++j) {
      if (j == i || game.Cross(i, j).isZero(0.0)) continue;
      os << "  \"" << i + 1 << "," << j + 1 << "\": " << FlowMatrix(game.Cross(i, j)) << "\n";
    }
  }
  os << "r:\n";
  for (int i = 0; i < dims.num_players(); ++i) os << "  - " << Row(game.Offset(i)) << "\n";
  return os.str();
}

std::string EmitGraphDocument(const Problem& problem) {
  const GameGraph& graph = problem.graph;
  const PlayerDims& dims = graph.dims();
  std::ostringstream os;
  os << "source_kind: " << ProblemKindName(problem.kind) << "\n";
  os << "dims: [";
  for (int i = 0; i < dims.num_players(); ++i) os << (i ? ", " : "") << dims.dim(i);
  os << "]\n";
  os << "gamma: " << Row(Eigen::Map<const Vector>(graph.gamma().values().data(),
                                                  dims.num_players()))
     << "\n";
  if (problem.step_rule) {
    os << "step_rule: {gamma: " << FormatDouble(problem.step_rule->gamma)
       << ", alpha: " << FormatDouble(problem.step_rule->alpha)
       << ", beta: " << FormatDouble(problem.step_rule->beta) << "}\n";
  }
  os << "W:\n";
  for (Eigen::Index r = 0; r < graph.adjacency().rows(); ++r) {
    os << "  - " << Row(graph.adjacency().row(r).transpose()) << "\n";
  }
  os << "offset: " << Row(graph.offset()) << "\n";
  if (problem.lifted) {
    os << "G:\n";
    for (const Matrix& g : problem.lifted->control_maps) {
      os << "  - " << FlowMatrix(g) << "\n";
    }
    os << "H: " << FlowMatrix(problem.lifted->free_response) << "\n";
  }
  return os.str();
}

}  // namespace decouple
