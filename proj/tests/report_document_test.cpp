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

#include <gtest/gtest.h>

#include "decouple/decoupling.hpp"
#include "support/oracles.hpp"

namespace decouple {
namespace {

using testing::Rng;

void ExpectSameReport(const DecouplingReport& a, const DecouplingReport& b) {
  EXPECT_EQ(a.query.source, b.query.source);
  EXPECT_EQ(a.query.target, b.query.target);
  EXPECT_EQ(a.query.tolerance, b.query.tolerance);
  EXPECT_EQ(a.decoupled, b.decoupled);
  EXPECT_EQ(a.method, b.method);
  EXPECT_EQ(a.residuals, b.residuals);
  EXPECT_EQ(a.normalizers, b.normalizers);
}

TEST(ReportDocumentTest, RoundTripIsLossless) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int players = testing::UniformInt(rng, 2, 5);
    const auto game = testing::RandomGame(rng, testing::RandomDims(rng, players, 2));
    const GameGraph g = BuildGameGraph(game, testing::RandomStepSizes(rng, players));
    std::vector<ReportEntry> entries;
    for (const auto& r : AllPairsReport(g)) {
      entries.push_back({r, trial % 2 == 0 ? std::optional<double>(testing::Uniform(rng, 0, 9))
                                           : std::nullopt});
    }
    entries.push_back({CheckPaths(g, {0, 1}), std::nullopt});
    const std::string json = SerializeReports(entries);
    const auto back = ParseReports(json);
    ASSERT_EQ(back.size(), entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      ExpectSameReport(back[k].report, entries[k].report);
      EXPECT_EQ(back[k].runtime_ms, entries[k].runtime_ms);
    }
    EXPECT_EQ(SerializeReports(back), json);
  }
}

TEST(ReportDocumentTest, UsesOneBasedPairsAndStableKeys) {
  const GameGraph g = testing::ExampleOneGraph(1, 0.5, 1, -2, {0.5, 0.5, 0.5, 0.5});
  const std::string json = SerializeReports({{CheckAlgebraic(g, {0, 3}), std::nullopt}});
  std::string compact;
  for (char c : json) {
    if (c != ' ' && c != '\n') compact += c;
  }
  EXPECT_NE(compact.find("\"pair\":[1,4]"), std::string::npos) << json;
  EXPECT_NE(compact.find("\"verdict\":true"), std::string::npos);
  EXPECT_NE(compact.find("\"method\":\"algebraic\""), std::string::npos);
  EXPECT_NE(compact.find("\"firstFailingPower\":0"), std::string::npos) << json;
  EXPECT_EQ(json.find("runtimeMs"), std::string::npos);
}

TEST(ReportDocumentTest, MalformedInputIsAParseError) {
  for (const char* bad : {"", "{", "[]", "{\"reports\": 3}",
                          "{\"reports\": [{\"pair\": [1, 2]}]}",
                          "{\"reports\": [{\"pair\": [1, 2], \"verdict\": true, \"method\": "
                          "\"magic\", \"tolerance\": 1e-9, \"residuals\": [], "
                          "\"normalizers\": []}]}",
                          "{\"reports\": [{\"pair\": [1, 2], \"verdict\": true, \"method\": "
                          "\"algebraic\", \"tolerance\": 1e-9, \"residuals\": [0], "
                          "\"normalizers\": []}]}"}) {
    try {
      ParseReports(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse) << bad;
    }
  }
}

TEST(ReportDocumentTest, SweepDocument) {
  SweepPoint point;
  point.bound = 2.5;
  point.report.players = {{1.5, 0.5}, {0.0, 0.0}};
  point.report.compared_iterates = 11;
  const std::string json = SerializeSweep({point}, 0);
  EXPECT_NE(json.find("\"disturbedPlayer\": 1"), std::string::npos) << json;
  EXPECT_NE(json.find("\"bound\": 2.5"), std::string::npos);
  EXPECT_NE(json.find("\"comparedIterates\": 11"), std::string::npos);
  EXPECT_NE(json.find("\"maxDeviation\": 1.5"), std::string::npos);
  EXPECT_EQ(json.find("cleanCosts"), std::string::npos);
}

}  // namespace
}  // namespace decouple
