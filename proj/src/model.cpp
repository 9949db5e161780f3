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

#include "tcm/model.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "tcm/error.hpp"

namespace tcm {

void TestSuite::validate() const {
    std::unordered_set<std::string> feature_ids;
    for (const auto& f : features) {
        if (f.id.empty()) throw ValidationError("feature with empty id");
        if (!feature_ids.insert(f.id).second)
            throw ValidationError("duplicate feature id '" + f.id + "'");
    }
    std::unordered_set<std::string> test_ids;
    for (const auto& t : tests) {
        if (t.id.empty()) throw ValidationError("test with empty id");
        if (!test_ids.insert(t.id).second)
            throw ValidationError("duplicate test id '" + t.id + "'");
        if (!std::isfinite(t.cost) || t.cost < 0.0)
            throw ValidationError("test '" + t.id + "' has negative or non-finite cost");
        if (t.covers.empty())
            throw ValidationError("test '" + t.id + "' covers no features");
        std::unordered_set<std::string> seen;
        for (const auto& f : t.covers) {
            if (!feature_ids.contains(f))
                throw ValidationError("test '" + t.id + "' references unknown feature '" + f + "'");
            if (!seen.insert(f).second)
                throw ValidationError("test '" + t.id + "' lists feature '" + f + "' twice");
        }
    }
}

const TestCase* TestSuite::find_test(const std::string& id) const {
    for (const auto& t : tests)
        if (t.id == id) return &t;
    return nullptr;
}

std::optional<std::size_t> CoverageMatrix::test_index(const std::string& id) const {
    for (std::size_t i = 0; i < test_order_.size(); ++i)
        if (test_order_[i] == id) return i;
    return std::nullopt;
}

CoverageMatrix build_coverage_matrix(const TestSuite& suite) {
    suite.validate();

    CoverageMatrix m;
    const std::size_t rows = suite.features.size();
    const std::size_t cols = suite.tests.size();

    std::unordered_map<std::string, std::size_t> row_of;
    m.feature_order_.reserve(rows);
    for (std::size_t j = 0; j < rows; ++j) {
        m.feature_order_.push_back(suite.features[j].id);
        row_of.emplace(suite.features[j].id, j);
    }

    m.incidence_.assign(rows * cols, 0);
    m.covering_.assign(rows, {});
    m.test_order_.reserve(cols);
    m.costs_.reserve(cols);
    for (std::size_t i = 0; i < cols; ++i) {
        const auto& t = suite.tests[i];
        m.test_order_.push_back(t.id);
        m.costs_.push_back(t.cost);
        for (const auto& f : t.covers) m.incidence_[row_of.at(f) * cols + i] = 1;
    }
    // Fill covering sets column-ascending so S_j is sorted.
    for (std::size_t j = 0; j < rows; ++j)
        for (std::size_t i = 0; i < cols; ++i)
            if (m.incidence_[j * cols + i]) m.covering_[j].push_back(i);
    return m;
}

CoverageMatrix CoverageMatrix::from_incidence(std::vector<std::string> feature_ids,
                                             std::vector<std::string> test_ids,
                                             const std::vector<std::vector<bool>>& incidence,
                                             std::vector<double> costs) {
    const std::size_t rows = feature_ids.size();
    const std::size_t cols = test_ids.size();
    if (incidence.size() != rows || costs.size() != cols)
        throw ValidationError("coverage matrix dimensions are inconsistent");
    std::unordered_set<std::string> seen;
    for (const auto& id : feature_ids)
        if (!seen.insert(id).second) throw ValidationError("duplicate feature id '" + id + "'");
    seen.clear();
    for (std::size_t i = 0; i < cols; ++i) {
        if (!seen.insert(test_ids[i]).second) throw ValidationError("duplicate test id '" + test_ids[i] + "'");
        if (!std::isfinite(costs[i]) || costs[i] < 0.0)
            throw ValidationError("test '" + test_ids[i] + "' has negative or non-finite cost");
    }

    CoverageMatrix m;
    m.feature_order_ = std::move(feature_ids);
    m.test_order_ = std::move(test_ids);
    m.costs_ = std::move(costs);
    m.incidence_.assign(rows * cols, 0);
    m.covering_.assign(rows, {});
    for (std::size_t j = 0; j < rows; ++j) {
        if (incidence[j].size() != cols) throw ValidationError("coverage matrix row has the wrong length");
        for (std::size_t i = 0; i < cols; ++i)
            if (incidence[j][i]) {
                m.incidence_[j * cols + i] = 1;
                m.covering_[j].push_back(i);
            }
    }
    return m;
}

std::vector<std::string> uncoverable_features(const CoverageMatrix& matrix) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < matrix.num_features(); ++j)
        if (matrix.covering_tests(j).empty()) out.push_back(matrix.feature_order()[j]);
    return out;
}

}  // namespace tcm
