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

#include "tcm/verify.hpp"

#include <algorithm>

#include "tcm/error.hpp"

namespace tcm {

namespace {

// Column mask for a selection; unknown ids are an error.
std::vector<bool> selection_mask(const CoverageMatrix& matrix, const std::vector<std::string>& selection) {
    std::vector<bool> mask(matrix.num_tests(), false);
    for (const auto& id : selection) {
        auto idx = matrix.test_index(id);
        if (!idx) throw ValidationError("unknown test id '" + id + "' in selection");
        mask[*idx] = true;
    }
    return mask;
}

}  // namespace

nlohmann::json to_json(const CoverageReport& report) {
    return nlohmann::json{{"covered", report.covered},
                          {"removable", report.removable},
                          {"selected", report.selected},
                          {"total_cost", report.total_cost},
                          {"uncovered", report.uncovered}};
}

CoverageReport check_coverage(const CoverageMatrix& matrix, const std::vector<std::string>& selection) {
    const auto mask = selection_mask(matrix, selection);
    const std::size_t n = matrix.num_tests();
    const std::size_t m = matrix.num_features();

    CoverageReport report;
    std::vector<std::size_t> hits(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i : matrix.covering_tests(j))
            if (mask[i]) ++hits[j];
        (hits[j] > 0 ? report.covered : report.uncovered).push_back(matrix.feature_order()[j]);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        report.selected.push_back(matrix.test_order()[i]);
        report.total_cost += matrix.costs()[i];
        // Removable iff every feature this test covers has another selected cover.
        bool sole_cover = false;
        for (std::size_t j = 0; j < m && !sole_cover; ++j)
            sole_cover = matrix.covers(j, i) && hits[j] == 1;
        if (!sole_cover) report.removable.push_back(matrix.test_order()[i]);
    }
    return report;
}

double selection_cost(const CoverageMatrix& matrix, const std::vector<std::string>& selection) {
    const auto mask = selection_mask(matrix, selection);
    double total = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) total += matrix.costs()[i];
    return total;
}

GapReport gap_report(const CoverageMatrix& matrix, const std::vector<std::string>& qubo_selection,
                     const std::vector<std::string>& oracle_selection) {
    const auto uncoverable = uncoverable_features(matrix);
    auto require_full = [&](const std::vector<std::string>& sel, const char* which) {
        const auto report = check_coverage(matrix, sel);
        for (const auto& f : report.uncovered)
            if (std::find(uncoverable.begin(), uncoverable.end(), f) == uncoverable.end())
                throw ValidationError(std::string(which) + " selection leaves feature '" + f +
                                      "' uncovered");
        return report.total_cost;
    };

    GapReport gap;
    gap.qubo_cost = require_full(qubo_selection, "qubo");
    gap.oracle_cost = require_full(oracle_selection, "oracle");
    gap.relative_gap = (gap.qubo_cost - gap.oracle_cost) / std::max(gap.oracle_cost, 1e-12);
    return gap;
}

std::vector<std::string> selected_ids(const CoverageMatrix& matrix, const Assignment& x) {
    if (x.size() != matrix.num_tests()) throw ValidationError("assignment length mismatch");
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) ids.push_back(matrix.test_order()[i]);
    return ids;
}

}  // namespace tcm
