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

// decouple-cli: disturbance decoupling analysis for gradient play.
//
//   decouple-cli analyze  game.yaml --pair 1 4 | --all-pairs [--method paths] [--exact]
//   decouple-cli simulate game.yaml --disturb 1 --bound 50 [--sweep 1,10,50] [--out dir]
//   decouple-cli build    game.yaml --emit graph|game
//   decouple-cli nash     game.yaml
//   decouple-cli stepsize game.yaml
//
// Exit status: 0 success (analyze: every queried pair decoupled), 1 some pair
// not decoupled, 2 error.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "decouple/decouple.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotDecoupled = 1;
constexpr int kExitError = 2;

struct ModelDeleter {
  void operator()(dcp_model* m) const { dcp_model_free(m); }
};
struct ReportDeleter {
  void operator()(dcp_report* r) const { dcp_report_free(r); }
};
struct SimDeleter {
  void operator()(dcp_sim* s) const { dcp_sim_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { dcp_string_free(s); }
};
using ModelPtr = std::unique_ptr<dcp_model, ModelDeleter>;
using ReportPtr = std::unique_ptr<dcp_report, ReportDeleter>;
using SimPtr = std::unique_ptr<dcp_sim, SimDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Thrown for any failed library call; main() prints it and exits with 2.
struct CliError {
  std::string message;
};

void Check(dcp_status status) {
  if (status == DCP_OK) return;
  std::string message = dcp_status_string(status);
  const std::string detail = dcp_last_error();
  if (!detail.empty()) message += ": " + detail;
  throw CliError{message};
}

std::string Format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ModelPtr Load(const std::string& path) {
  dcp_model* raw = nullptr;
  Check(dcp_model_load_file(path.c_str(), &raw));
  ModelPtr model(raw);
  char* warnings = nullptr;
  Check(dcp_model_warnings(model.get(), &warnings));
  StringPtr owned(warnings);
  if (owned && owned.get()[0] != '\0') std::fprintf(stderr, "warning: %s", owned.get());
  return model;
}

int ThreadLimit() {
  unsigned hw = std::thread::hardware_concurrency();
  int limit = hw > 0 ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("DECOUPLING_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested >= 1) limit = requested;
    } catch (const std::exception&) {
      std::fprintf(stderr, "warning: ignoring DECOUPLING_THREADS=%s\n", env);
    }
  }
  return limit;
}

void WriteFile(const std::filesystem::path& path, const char* content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw CliError{"cannot write " + path.string()};
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string input;
  std::vector<int> pair;
  bool all_pairs = false;
  std::string method = "algebraic";
  double tolerance = 0.0;
  bool exact = false;
  bool json = false;
  bool timing = false;
};

void PrintReport(const dcp_report* report, double tolerance, const char* method) {
  for (size_t e = 0; e < dcp_report_count(report); ++e) {
    int source = 0, target = 0, decoupled = 0, failing = 0;
    Check(dcp_report_entry(report, e, &source, &target, &decoupled, &failing));
    std::printf("pair %d -> %d: %s (method %s", source, target,
                decoupled ? "decoupled" : "NOT decoupled", method);
    if (std::string(method) != "exact") std::printf(", tolerance %g", tolerance);
    std::printf(")\n");
    for (size_t k = 0; k < dcp_report_num_powers(report, e); ++k) {
      double residual = 0.0, normalizer = 0.0;
      Check(dcp_report_residual(report, e, k, &residual, &normalizer));
      std::printf("  k=%zu residual=%s norm=%s%s\n", k + 1, Format(residual).c_str(),
                  Format(normalizer).c_str(),
                  static_cast<int>(k) + 1 == failing ? "  <- first failure" : "");
    }
  }
}

int RunAnalyze(const AnalyzeOptions& opt) {
  if (opt.all_pairs == !opt.pair.empty()) {
    throw CliError{"analyze needs exactly one of --pair i j or --all-pairs"};
  }
  dcp_method method = DCP_METHOD_ALGEBRAIC;
  std::string method_name = opt.method;
  if (opt.exact) {
    method = DCP_METHOD_EXACT;
    method_name = "exact";
  } else if (opt.method == "paths") {
    method = DCP_METHOD_PATHS;
  }
  ModelPtr model = Load(opt.input);
  const double tolerance = opt.tolerance > 0.0 ? opt.tolerance : dcp_model_tolerance(model.get());

  dcp_report* raw = nullptr;
  const auto start = std::chrono::steady_clock::now();
  if (opt.all_pairs) {
    Check(dcp_analyze_all(model.get(), method, tolerance, &raw));
  } else {
    Check(dcp_analyze_pair(model.get(), opt.pair[0], opt.pair[1], method, tolerance, &raw));
  }
  const std::chrono::duration<double, std::milli> elapsed =
      std::chrono::steady_clock::now() - start;
  ReportPtr report(raw);
  if (opt.timing) dcp_report_set_runtime(report.get(), elapsed.count());

  if (opt.json) {
    char* json = nullptr;
    Check(dcp_report_to_json(report.get(), &json));
    StringPtr owned(json);
    std::fputs(owned.get(), stdout);
  } else {
    PrintReport(report.get(), tolerance, method_name.c_str());
    if (opt.timing) std::printf("runtime %s ms\n", Format(elapsed.count()).c_str());
  }
  return dcp_report_all_decoupled(report.get()) ? kExitOk : kExitNotDecoupled;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string input;
  int steps = 100;
  int disturb = 1;
  double bound = 1.0;
  std::optional<std::uint64_t> seed;
  std::vector<double> sweep;
  std::string out;
};

int RunSimulate(const SimulateOptions& opt) {
  if (opt.steps < 1) throw CliError{"--steps must be positive"};
  ModelPtr model = Load(opt.input);
  const std::uint64_t seed = opt.seed ? *opt.seed : dcp_model_seed(model.get());
  std::filesystem::path out_dir;
  if (!opt.out.empty()) {
    out_dir = opt.out;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw CliError{"cannot create " + out_dir.string() + ": " + ec.message()};
  }

  dcp_sim* raw = nullptr;
  if (!opt.sweep.empty()) {
    Check(dcp_sweep(model.get(), opt.steps, opt.disturb, opt.sweep.data(), opt.sweep.size(),
                    seed, ThreadLimit(), &raw));
  } else {
    dcp_disturbance d{};
    d.player = opt.disturb;
    d.kind = DCP_DISTURB_UNIFORM;
    d.bound = opt.bound;
    d.seed = seed;
    Check(dcp_simulate(model.get(), opt.steps, &d, &raw));
  }
  SimPtr sim(raw);

  std::printf("disturbed player %d, %d steps, seed %" PRIu64 "\n", opt.disturb, opt.steps,
              seed);
  const int players = dcp_sim_num_players(sim.get());
  for (size_t p = 0; p < dcp_sim_num_points(sim.get()); ++p) {
    const double bound = opt.sweep.empty() ? opt.bound : opt.sweep[p];
    std::printf("bound %s\n", Format(bound).c_str());
    for (int j = 1; j <= players; ++j) {
      double max_dev = 0.0, rel_dev = 0.0;
      Check(dcp_sim_deviation(sim.get(), p, j, &max_dev, &rel_dev));
      std::printf("  player %d: maxDeviation=%s relDeviation=%s\n", j,
                  Format(max_dev).c_str(), Format(rel_dev).c_str());
    }
    if (dcp_sim_diverged(sim.get(), p)) {
      std::printf("  corrupted run diverged; deviations cover the finite prefix\n");
    }
  }

  if (!out_dir.empty()) {
    // fn fills a library-owned string; written verbatim to out_dir/name.
    auto emit = [&](const char* name, auto fn) {
      char* text = nullptr;
      Check(fn(&text));
      StringPtr owned(text);
      WriteFile(out_dir / name, owned.get());
    };
    const dcp_sim* s = sim.get();
    emit("deviation.json", [s](char** t) { return dcp_sim_to_json(s, t); });
    emit("deviation.csv", [s](char** t) { return dcp_sim_sweep_csv(s, t); });
    if (opt.sweep.empty()) {
      emit("trajectory_clean.csv",
           [s](char** t) { return dcp_sim_trajectory_csv(s, DCP_RUN_CLEAN, t); });
      emit("trajectory_corrupted.csv",
           [s](char** t) { return dcp_sim_trajectory_csv(s, DCP_RUN_CORRUPTED, t); });
      emit("costs.csv", [s](char** t) { return dcp_sim_costs_csv(s, t); });
    }
    std::printf("wrote %s\n", out_dir.string().c_str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// build, nash, stepsize

int RunBuild(const std::string& input, const std::string& emit) {
  ModelPtr model = Load(input);
  char* text = nullptr;
  Check(dcp_emit(model.get(), emit == "game" ? DCP_EMIT_GAME : DCP_EMIT_GRAPH, &text));
  StringPtr owned(text);
  std::fputs(owned.get(), stdout);
  return kExitOk;
}

int RunNash(const std::string& input) {
  ModelPtr model = Load(input);
  std::vector<double> action(dcp_model_total_dim(model.get()));
  Check(dcp_nash(model.get(), action.data(), action.size(), nullptr));
  for (double v : action) std::printf("%s\n", Format(v).c_str());
  return kExitOk;
}

int RunStepsize(const std::string& input) {
  ModelPtr model = Load(input);
  double gamma = 0.0;
  Check(dcp_stepsize(model.get(), &gamma, nullptr, nullptr));
  std::printf("%s\n", Format(gamma).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disturbance decoupling analysis for gradient play in quadratic games"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Decoupling verdicts for player pairs");
  analyze_cmd->add_option("input", analyze.input, "Game document, or - for stdin")->required();
  auto* pair_opt = analyze_cmd->add_option("--pair", analyze.pair, "Source and target player")
                       ->expected(2);
  auto* all_opt = analyze_cmd->add_flag("--all-pairs", analyze.all_pairs, "Every ordered pair");
  pair_opt->excludes(all_opt);
  analyze_cmd->add_option("--method", analyze.method, "algebraic or paths")
      ->check(CLI::IsMember({"algebraic", "paths"}));
  analyze_cmd->add_option("--tolerance", analyze.tolerance, "Zero-test tolerance")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--exact", analyze.exact, "Rational arithmetic");
  analyze_cmd->add_flag("--json", analyze.json, "Print the JSON report");
  analyze_cmd->add_flag("--timing", analyze.timing, "Include wall time");

  SimulateOptions simulate;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Clean vs. disturbed gradient play");
  simulate_cmd->add_option("input", simulate.input, "Game document, or - for stdin")
      ->required();
  simulate_cmd->add_option("--steps", simulate.steps, "Iterations")->capture_default_str();
  simulate_cmd->add_option("--disturb", simulate.disturb, "Disturbed player")
      ->capture_default_str();
  simulate_cmd->add_option("--bound", simulate.bound, "Disturbance norm bound")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--seed", simulate.seed, "Seed (default: document seed)");
  simulate_cmd->add_option("--sweep", simulate.sweep, "Comma-separated bounds")
      ->delimiter(',');
  simulate_cmd->add_option("--out", simulate.out, "Output directory for CSV/JSON files");

  std::string build_input;
  std::string emit = "graph";
  CLI::App* build_cmd = app.add_subcommand("build", "Emit the game graph or quadratic game");
  build_cmd->add_option("input", build_input, "Game document, or - for stdin")->required();
  build_cmd->add_option("--emit", emit, "graph or game")
      ->capture_default_str()
      ->check(CLI::IsMember({"graph", "game"}));

  std::string nash_input;
  CLI::App* nash_cmd = app.add_subcommand("nash", "Nash equilibrium of the game");
  nash_cmd->add_option("input", nash_input, "Game document, or - for stdin")->required();

  std::string stepsize_input;
  CLI::App* stepsize_cmd = app.add_subcommand("stepsize", "Uniform step size from the Jacobian");
  stepsize_cmd->add_option("input", stepsize_input, "Game document, or - for stdin")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*analyze_cmd) return RunAnalyze(analyze);
    if (*simulate_cmd) return RunSimulate(simulate);
    if (*build_cmd) return RunBuild(build_input, emit);
    if (*nash_cmd) return RunNash(nash_input);
    if (*stepsize_cmd) return RunStepsize(stepsize_input);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitError;
  }
  return kExitError;
}
