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

#ifndef DECOUPLE_REPORT_DOCUMENT_HPP_
#define DECOUPLE_REPORT_DOCUMENT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decouple/decoupling.hpp"
#include "decouple/simulator.hpp"

// JSON serialization of analysis and simulation results. Player indices in
// documents are 1-based.

namespace decouple {

struct ReportEntry {
  DecouplingReport report;
  // Wall time of the analysis; omitted from output when unset so that
  // documents stay byte-identical across runs.
  std::optional<double> runtime_ms;
};

std::string SerializeReports(const std::vector<ReportEntry>& entries);
// Throws Error(kParse) on malformed input.
std::vector<ReportEntry> ParseReports(std::string_view json);

std::string SerializeSweep(const std::vector<SweepPoint>& points, int disturbed_player);

}  // namespace decouple

#endif  // DECOUPLE_REPORT_DOCUMENT_HPP_
