// Copyright 2026 The tcmq Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcm/model.hpp"
#include "tcm/qubo.hpp"

namespace tcm {

struct CoverageReport {
    std::vector<std::string> covered;
    std::vector<std::string> uncovered;
    std::vector<std::string> selected;
    double total_cost = 0.0;
    // Selected tests whose individual removal leaves `covered` unchanged.
    std::vector<std::string> removable;
};

// Key-sorted document form used by the CLI.
nlohmann::json to_json(const CoverageReport& report);

CoverageReport check_coverage(const CoverageMatrix& matrix, const std::vector<std::string>& selection);

double selection_cost(const CoverageMatrix& matrix, const std::vector<std::string>& selection);

struct GapReport {
    double qubo_cost = 0.0;
    double oracle_cost = 0.0;
    double relative_gap = 0.0;
};

// (qubo_cost - oracle_cost) / max(oracle_cost, 1e-12). Both selections must
// cover every coverable feature.
GapReport gap_report(const CoverageMatrix& matrix, const std::vector<std::string>& qubo_selection,
                     const std::vector<std::string>& oracle_selection);

// Test ids of the variables set in `x`, in column order.
std::vector<std::string> selected_ids(const CoverageMatrix& matrix, const Assignment& x);

}  // namespace tcm
