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

#include "decouple/report_document.hpp"

#include <json.hpp>

namespace decouple {

using nlohmann::json;

namespace {

Method MethodFromName(const std::string& name) {
  for (Method m : {Method::kAlgebraic, Method::kPathEnumeration, Method::kExact}) {
    if (name == MethodName(m)) return m;
  }
  throw Error(ErrorCode::kParse, "unknown method '" + name + "'");
}

json CostsJson(const Matrix& costs) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < costs.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < costs.cols(); ++k) row.push_back(costs(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string SerializeReports(const std::vector<ReportEntry>& entries) {
  json reports = json::array();
  for (const ReportEntry& entry : entries) {
    const DecouplingReport& r = entry.report;
    json item = {
        {"pair", {r.query.source + 1, r.query.target + 1}},
        {"verdict", r.decoupled},
        {"method", MethodName(r.method)},
        {"tolerance", r.query.tolerance},
        {"residuals", r.residuals},
        {"normalizers", r.normalizers},
        {"firstFailingPower", r.FirstFailingPower()},
    };
    if (entry.runtime_ms) item["runtimeMs"] = *entry.runtime_ms;
    reports.push_back(std::move(item));
  }
  return json{{"reports", std::move(reports)}}.dump(2) + "\n";
}

std::vector<ReportEntry> ParseReports(std::string_view text) {
  std::vector<ReportEntry> entries;
  try {
    const json doc = json::parse(text);
    for (const json& item : doc.at("reports")) {
      ReportEntry entry;
      DecouplingReport& r = entry.report;
      const auto pair = item.at("pair").get<std::vector<int>>();
      if (pair.size() != 2) throw Error(ErrorCode::kParse, "pair must have two entries");
      r.query.source = pair[0] - 1;
      r.query.target = pair[1] - 1;
      r.query.tolerance = item.at("tolerance").get<double>();
      r.decoupled = item.at("verdict").get<bool>();
      r.method = MethodFromName(item.at("method").get<std::string>());
      r.residuals = item.at("residuals").get<std::vector<double>>();
      r.normalizers = item.at("normalizers").get<std::vector<double>>();
      if (r.residuals.size() != r.normalizers.size()) {
        throw Error(ErrorCode::kParse, "residuals and normalizers differ in length");
      }
      if (item.contains("runtimeMs")) entry.runtime_ms = item["runtimeMs"].get<double>();
      entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report document: ") + e.what());
  }
  return entries;
}

std::string SerializeSweep(const std::vector<SweepPoint>& points, int disturbed_player) {
  json sweep = json::array();
  for (const SweepPoint& point : points) {
    json players = json::array();
    for (std::size_t j = 0; j < point.report.players.size(); ++j) {
      players.push_back({{"player", j + 1},
                         {"maxDeviation", point.report.players[j].max_deviation},
                         {"relDeviation", point.report.players[j].relative_deviation}});
    }
    json item = {{"bound", point.bound},
                 {"diverged", point.report.diverged},
                 {"comparedIterates", point.report.compared_iterates},
                 {"players", std::move(players)}};
    if (point.report.clean_costs.size() > 0) {
      item["cleanCosts"] = CostsJson(point.report.clean_costs);
      item["corruptedCosts"] = CostsJson(point.report.corrupted_costs);
    }
    sweep.push_back(std::move(item));
  }
  return json{{"disturbedPlayer", disturbed_player + 1}, {"sweep", std::move(sweep)}}.dump(2) +
         "\n";
}

}  // namespace decouple
