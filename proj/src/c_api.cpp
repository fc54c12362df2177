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

#include "decouple/decouple.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "decouple/decoupling.hpp"
#include "decouple/exact.hpp"
#include "decouple/problem.hpp"
#include "decouple/report_document.hpp"
#include "decouple/simulator.hpp"

using decouple::DecouplingQuery;
using decouple::DecouplingReport;
using decouple::Error;
using decouple::ErrorCode;
using decouple::Problem;

struct dcp_model {
  Problem problem;
  // Graph models have no underlying game specification.
  bool from_graph = false;
};

struct dcp_report {
  std::vector<decouple::ReportEntry> entries;
};

struct dcp_sim {
  int disturbed_player = 0;
  std::vector<decouple::SweepPoint> points;
  // Only for single runs.
  std::optional<decouple::Trajectory> clean;
  std::optional<decouple::Trajectory> corrupted;
};

namespace {

thread_local std::string last_error;

dcp_status FromCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return DCP_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimensionMismatch: return DCP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kSingularJacobian: return DCP_ERR_SINGULAR_JACOBIAN;
    case ErrorCode::kStepSizeRuleInapplicable: return DCP_ERR_STEP_SIZE_RULE;
    case ErrorCode::kEnumerationCapExceeded: return DCP_ERR_ENUMERATION_CAP;
    case ErrorCode::kNotPotentialGame: return DCP_ERR_NOT_POTENTIAL_GAME;
    case ErrorCode::kDivergence: return DCP_ERR_DIVERGENCE;
    case ErrorCode::kParse: return DCP_ERR_PARSE;
    case ErrorCode::kIo: return DCP_ERR_IO;
  }
  return DCP_ERR_INTERNAL;
}

dcp_status Fail(dcp_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
dcp_status Guard(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const Error& e) {
    return Fail(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DCP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DCP_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(DCP_ERR_INTERNAL, "unknown error");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define DCP_REQUIRE(cond, message)                                    \
  do {                                                                \
    if (!(cond)) return Fail(DCP_ERR_INVALID_ARGUMENT, (message));    \
  } while (0)

int ToPlayer(const dcp_model* model, int one_based) {
  const int n = model->problem.graph.num_players();
  if (one_based < 1 || one_based > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "player " + std::to_string(one_based) + " out of range 1.." +
                    std::to_string(n));
  }
  return one_based - 1;
}

double ResolveTolerance(const dcp_model* model, double tolerance) {
  return tolerance > 0.0 ? tolerance : model->problem.tolerance;
}

decouple::RationalMatrix ExactW(const dcp_model* model) {
  const Problem& p = model->problem;
  if (model->from_graph) return decouple::RationalMatrix::FromDouble(p.graph.adjacency());
  return decouple::ExactAdjacency(p.game, p.graph.gamma());
}

std::vector<DecouplingReport> AnalyzeAll(const dcp_model* model, dcp_method method,
                                         double tolerance) {
  const decouple::GameGraph& graph = model->problem.graph;
  switch (method) {
    case DCP_METHOD_ALGEBRAIC:
      return decouple::AllPairsReport(graph, tolerance);
    case DCP_METHOD_PATHS: {
      std::vector<DecouplingReport> all;
      for (int s = 0; s < graph.num_players(); ++s) {
        for (auto& r : decouple::CheckPathsFromSource(graph, s, tolerance)) {
          all.push_back(std::move(r));
        }
      }
      return all;
    }
    case DCP_METHOD_EXACT:
      return decouple::AllPairsExact(ExactW(model), graph.dims());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

DecouplingReport AnalyzePair(const dcp_model* model, const DecouplingQuery& query,
                             dcp_method method) {
  const decouple::GameGraph& graph = model->problem.graph;
  switch (method) {
    case DCP_METHOD_ALGEBRAIC:
      return decouple::CheckAlgebraic(graph, query);
    case DCP_METHOD_PATHS:
      return decouple::CheckPaths(graph, query);
    case DCP_METHOD_EXACT:
      return decouple::CheckExact(ExactW(model), graph.dims(), query);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

decouple::DisturbanceSignal MakeSignal(const dcp_model* model, const dcp_disturbance& d) {
  using decouple::DisturbanceSignal;
  const int player = ToPlayer(model, d.player);
  auto value = [&]() {
    if (d.value == nullptr && d.value_len > 0) {
      throw Error(ErrorCode::kInvalidArgument, "disturbance value is null");
    }
    return decouple::Vector(
        Eigen::Map<const decouple::Vector>(d.value, static_cast<Eigen::Index>(d.value_len)));
  };
  switch (d.kind) {
    case DCP_DISTURB_ZERO:
      return DisturbanceSignal::None(player);
    case DCP_DISTURB_CONSTANT:
      return DisturbanceSignal(player, DisturbanceSignal::Constant{value()});
    case DCP_DISTURB_IMPULSE:
      return DisturbanceSignal(player, DisturbanceSignal::Impulse{d.step, value()});
    case DCP_DISTURB_UNIFORM:
      return DisturbanceSignal(player, DisturbanceSignal::SeededUniform{d.seed, d.bound});
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown disturbance kind");
}

std::string TrajectoryCsv(const decouple::Trajectory& t) {
  std::ostringstream os;
  os << "k,player,coord,value\n";
  const decouple::PlayerDims& dims = t.dims();
  for (int k = 0; k <= t.steps(); ++k) {
    const decouple::Vector& x = t.iterate(k);
    for (int i = 0; i < dims.num_players(); ++i) {
      for (int c = 0; c < dims.dim(i); ++c) {
        os << k << ',' << i + 1 << ',' << c + 1 << ','
           << decouple::FormatDouble(x(dims.offset(i) + c)) << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace

extern "C" {

const char* dcp_status_string(dcp_status status) {
  switch (status) {
    case DCP_OK: return "ok";
    case DCP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DCP_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case DCP_ERR_SINGULAR_JACOBIAN: return "singular jacobian";
    case DCP_ERR_STEP_SIZE_RULE: return "step-size rule inapplicable";
    case DCP_ERR_ENUMERATION_CAP: return "path enumeration cap exceeded";
    case DCP_ERR_NOT_POTENTIAL_GAME: return "not a potential game";
    case DCP_ERR_DIVERGENCE: return "divergence";
    case DCP_ERR_PARSE: return "parse error";
    case DCP_ERR_IO: return "i/o error";
    case DCP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dcp_last_error(void) { return last_error.c_str(); }

void dcp_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------------------
// Models

dcp_status dcp_model_load_file(const char* path, dcp_model** out) {
  DCP_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    *out = new dcp_model{decouple::LoadProblem(path)};
    return DCP_OK;
  });
}

dcp_status dcp_model_load_string(const char* text, const char* source_name,
                                 dcp_model** out) {
  DCP_REQUIRE(text != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    *out = new dcp_model{
        decouple::ParseProblem(text, source_name != nullptr ? source_name : "<input>")};
    return DCP_OK;
  });
}

dcp_status dcp_model_from_adjacency(int num_players, const int* dims, const double* w,
                                    const double* gamma, const double* offset,
                                    dcp_model** out) {
  DCP_REQUIRE(num_players > 0, "num_players must be positive");
  DCP_REQUIRE(dims != nullptr && w != nullptr && gamma != nullptr && out != nullptr,
              "null argument");
  return Guard([&] {
    decouple::PlayerDims player_dims(std::vector<int>(dims, dims + num_players));
    const int n = player_dims.total();
    decouple::Matrix adjacency =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(w, n, n);
    decouple::Vector off = offset != nullptr
                               ? decouple::Vector(Eigen::Map<const decouple::Vector>(offset, n))
                               : decouple::Vector::Zero(n);
    decouple::GameGraph graph(player_dims, std::move(adjacency),
                              decouple::StepSizes(std::vector<double>(gamma, gamma + num_players)),
                              std::move(off));
    decouple::QuadraticGame game = decouple::GameFromGraph(graph);
    Problem problem{decouple::ProblemKind::kQuadratic, std::move(game), std::move(graph),
                    std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                    decouple::kDefaultTolerance, 0, decouple::Vector::Zero(n)};
    *out = new dcp_model{std::move(problem), true};
    return DCP_OK;
  });
}

void dcp_model_free(dcp_model* model) { delete model; }

int dcp_model_num_players(const dcp_model* model) {
  return model != nullptr ? model->problem.graph.num_players() : 0;
}

int dcp_model_total_dim(const dcp_model* model) {
  return model != nullptr ? model->problem.graph.total_dim() : 0;
}

const char* dcp_model_kind(const dcp_model* model) {
  if (model == nullptr) return "";
  if (model->from_graph) return "graph";
  return decouple::ProblemKindName(model->problem.kind);
}

double dcp_model_tolerance(const dcp_model* model) {
  return model != nullptr ? model->problem.tolerance : decouple::kDefaultTolerance;
}

uint64_t dcp_model_seed(const dcp_model* model) {
  return model != nullptr ? model->problem.seed : 0;
}

dcp_status dcp_model_warnings(const dcp_model* model, char** out) {
  DCP_REQUIRE(model != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    std::ostringstream os;
    if (model->problem.kind == decouple::ProblemKind::kQuadratic && !model->from_graph) {
      for (int i : model->problem.game.AsymmetricSelfBlocks()) {
        os << "P[" << i + 1 << "] is not symmetric; the gradient uses it as given\n";
      }
    }
    *out = CopyString(os.str());
    return DCP_OK;
  });
}

// ---------------------------------------------------------------------------
// Analysis

dcp_status dcp_analyze_pair(const dcp_model* model, int source, int target,
                            dcp_method method, double tolerance, dcp_report** out) {
  DCP_REQUIRE(model != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    DecouplingQuery query{ToPlayer(model, source), ToPlayer(model, target),
                          ResolveTolerance(model, tolerance)};
    auto report = std::make_unique<dcp_report>();
    report->entries.push_back({AnalyzePair(model, query, method), std::nullopt});
    *out = report.release();
    return DCP_OK;
  });
}

dcp_status dcp_analyze_all(const dcp_model* model, dcp_method method, double tolerance,
                           dcp_report** out) {
  DCP_REQUIRE(model != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    auto report = std::make_unique<dcp_report>();
    for (auto& r : AnalyzeAll(model, method, ResolveTolerance(model, tolerance))) {
      report->entries.push_back({std::move(r), std::nullopt});
    }
    *out = report.release();
    return DCP_OK;
  });
}

void dcp_report_free(dcp_report* report) { delete report; }

size_t dcp_report_count(const dcp_report* report) {
  return report != nullptr ? report->entries.size() : 0;
}

int dcp_report_all_decoupled(const dcp_report* report) {
  if (report == nullptr) return 0;
  for (const auto& e : report->entries) {
    if (!e.report.decoupled) return 0;
  }
  return 1;
}

dcp_status dcp_report_entry(const dcp_report* report, size_t index, int* source,
                            int* target, int* decoupled, int* first_failing) {
  DCP_REQUIRE(report != nullptr, "null argument");
  DCP_REQUIRE(index < report->entries.size(), "report index out of range");
  const DecouplingReport& r = report->entries[index].report;
  if (source != nullptr) *source = r.query.source + 1;
  if (target != nullptr) *target = r.query.target + 1;
  if (decoupled != nullptr) *decoupled = r.decoupled ? 1 : 0;
  if (first_failing != nullptr) *first_failing = r.FirstFailingPower();
  return DCP_OK;
}

size_t dcp_report_num_powers(const dcp_report* report, size_t index) {
  if (report == nullptr || index >= report->entries.size()) return 0;
  return report->entries[index].report.residuals.size();
}

dcp_status dcp_report_residual(const dcp_report* report, size_t index, size_t k,
                               double* residual, double* normalizer) {
  DCP_REQUIRE(report != nullptr, "null argument");
  DCP_REQUIRE(index < report->entries.size(), "report index out of range");
  const DecouplingReport& r = report->entries[index].report;
  DCP_REQUIRE(k < r.residuals.size(), "power index out of range");
  if (residual != nullptr) *residual = r.residuals[k];
  if (normalizer != nullptr) *normalizer = r.normalizers[k];
  return DCP_OK;
}

void dcp_report_set_runtime(dcp_report* report, double runtime_ms) {
  if (report == nullptr) return;
  for (auto& e : report->entries) e.runtime_ms = runtime_ms;
}

dcp_status dcp_report_to_json(const dcp_report* report, char** out) {
  DCP_REQUIRE(report != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    *out = CopyString(decouple::SerializeReports(report->entries));
    return DCP_OK;
  });
}

dcp_status dcp_report_from_json(const char* json, dcp_report** out) {
  DCP_REQUIRE(json != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    *out = new dcp_report{decouple::ParseReports(json)};
    return DCP_OK;
  });
}

// ---------------------------------------------------------------------------
// Game-level quantities

dcp_status dcp_nash(const dcp_model* model, double* action, size_t capacity,
                    double* rcond) {
  DCP_REQUIRE(model != nullptr && action != nullptr, "null argument");
  return Guard([&] {
    const decouple::NashResult nash = decouple::NashEquilibrium(model->problem.game);
    if (capacity < static_cast<size_t>(nash.action.size())) {
      return Fail(DCP_ERR_INVALID_ARGUMENT, "output buffer too small");
    }
    for (Eigen::Index k = 0; k < nash.action.size(); ++k) action[k] = nash.action(k);
    if (rcond != nullptr) *rcond = nash.reciprocal_condition;
    return DCP_OK;
  });
}

dcp_status dcp_stepsize(const dcp_model* model, double* gamma, double* alpha,
                        double* beta) {
  DCP_REQUIRE(model != nullptr && gamma != nullptr, "null argument");
  return Guard([&] {
    const decouple::StepSizeRule rule =
        decouple::UniformStepSize(decouple::GameJacobian(model->problem.game));
    *gamma = rule.gamma;
    if (alpha != nullptr) *alpha = rule.alpha;
    if (beta != nullptr) *beta = rule.beta;
    return DCP_OK;
  });
}

dcp_status dcp_emit(const dcp_model* model, dcp_emit_kind kind, char** out) {
  DCP_REQUIRE(model != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    switch (kind) {
      case DCP_EMIT_GRAPH:
        *out = CopyString(decouple::EmitGraphDocument(model->problem));
        return DCP_OK;
      case DCP_EMIT_GAME:
        *out = CopyString(decouple::EmitGameDocument(model->problem));
        return DCP_OK;
    }
    return Fail(DCP_ERR_INVALID_ARGUMENT, "unknown emit kind");
  });
}

// ---------------------------------------------------------------------------
// Simulation

dcp_status dcp_simulate(const dcp_model* model, int steps,
                        const dcp_disturbance* disturbance, dcp_sim** out) {
  DCP_REQUIRE(model != nullptr && disturbance != nullptr && out != nullptr,
              "null argument");
  return Guard([&] {
    const Problem& p = model->problem;
    const decouple::DisturbanceSignal signal = MakeSignal(model, *disturbance);
    const decouple::PlayerCostFn cost = p.CostFunction();
    auto sim = std::make_unique<dcp_sim>();
    sim->disturbed_player = signal.player();
    sim->clean = decouple::Run(p.graph, p.x0, steps,
                               decouple::DisturbanceSignal::None(signal.player()), cost);
    bool diverged = false;
    try {
      sim->corrupted = decouple::Run(p.graph, p.x0, steps, signal, cost);
    } catch (const decouple::DivergenceError& e) {
      sim->corrupted = e.partial();
      diverged = true;
    }
    decouple::DeviationReport report = decouple::Deviation(*sim->clean, *sim->corrupted);
    report.diverged = diverged;
    const double bound = disturbance->kind == DCP_DISTURB_UNIFORM ? disturbance->bound : 0.0;
    sim->points.push_back({bound, std::move(report)});
    *out = sim.release();
    return DCP_OK;
  });
}

dcp_status dcp_sweep(const dcp_model* model, int steps, int player, const double* bounds,
                     size_t num_bounds, uint64_t seed, int max_threads, dcp_sim** out) {
  DCP_REQUIRE(model != nullptr && out != nullptr, "null argument");
  DCP_REQUIRE(bounds != nullptr || num_bounds == 0, "null bounds");
  return Guard([&] {
    const Problem& p = model->problem;
    auto sim = std::make_unique<dcp_sim>();
    sim->disturbed_player = ToPlayer(model, player);
    sim->points = decouple::MagnitudeSweep(
        p.graph, p.x0, steps, sim->disturbed_player,
        std::vector<double>(bounds, bounds + num_bounds), seed, p.CostFunction(),
        max_threads > 0 ? max_threads : 1);
    *out = sim.release();
    return DCP_OK;
  });
}

void dcp_sim_free(dcp_sim* sim) { delete sim; }

size_t dcp_sim_num_points(const dcp_sim* sim) {
  return sim != nullptr ? sim->points.size() : 0;
}

int dcp_sim_num_players(const dcp_sim* sim) {
  if (sim == nullptr || sim->points.empty()) return 0;
  return static_cast<int>(sim->points.front().report.players.size());
}

int dcp_sim_diverged(const dcp_sim* sim, size_t point) {
  if (sim == nullptr || point >= sim->points.size()) return 0;
  return sim->points[point].report.diverged ? 1 : 0;
}

dcp_status dcp_sim_deviation(const dcp_sim* sim, size_t point, int player,
                             double* max_deviation, double* rel_deviation) {
  DCP_REQUIRE(sim != nullptr, "null argument");
  DCP_REQUIRE(point < sim->points.size(), "point index out of range");
  const auto& players = sim->points[point].report.players;
  DCP_REQUIRE(player >= 1 && player <= static_cast<int>(players.size()),
              "player out of range");
  if (max_deviation != nullptr) *max_deviation = players[player - 1].max_deviation;
  if (rel_deviation != nullptr) *rel_deviation = players[player - 1].relative_deviation;
  return DCP_OK;
}

dcp_status dcp_sim_to_json(const dcp_sim* sim, char** out) {
  DCP_REQUIRE(sim != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    *out = CopyString(decouple::SerializeSweep(sim->points, sim->disturbed_player));
    return DCP_OK;
  });
}

dcp_status dcp_sim_trajectory_csv(const dcp_sim* sim, dcp_run run, char** out) {
  DCP_REQUIRE(sim != nullptr && out != nullptr, "null argument");
  DCP_REQUIRE(sim->clean.has_value(), "sweep results carry no trajectories");
  return Guard([&] {
    *out = CopyString(TrajectoryCsv(run == DCP_RUN_CLEAN ? *sim->clean : *sim->corrupted));
    return DCP_OK;
  });
}

dcp_status dcp_sim_costs_csv(const dcp_sim* sim, char** out) {
  DCP_REQUIRE(sim != nullptr && out != nullptr, "null argument");
  DCP_REQUIRE(sim->clean.has_value(), "sweep results carry no trajectories");
  return Guard([&] {
    const auto& report = sim->points.front().report;
    std::ostringstream os;
    os << "k,player,clean,corrupted\n";
    for (Eigen::Index k = 0; k < report.clean_costs.cols(); ++k) {
      for (Eigen::Index i = 0; i < report.clean_costs.rows(); ++i) {
        os << k << ',' << i + 1 << ',' << decouple::FormatDouble(report.clean_costs(i, k))
           << ',' << decouple::FormatDouble(report.corrupted_costs(i, k)) << '\n';
      }
    }
    *out = CopyString(os.str());
    return DCP_OK;
  });
}

dcp_status dcp_sim_sweep_csv(const dcp_sim* sim, char** out) {
  DCP_REQUIRE(sim != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    std::ostringstream os;
    os << "bound,player,maxDeviation,relDeviation\n";
    for (const auto& point : sim->points) {
      for (std::size_t j = 0; j < point.report.players.size(); ++j) {
        os << decouple::FormatDouble(point.bound) << ',' << j + 1 << ','
           << decouple::FormatDouble(point.report.players[j].max_deviation) << ','
           << decouple::FormatDouble(point.report.players[j].relative_deviation) << '\n';
      }
    }
    *out = CopyString(os.str());
    return DCP_OK;
  });
}

}  // extern "C"
