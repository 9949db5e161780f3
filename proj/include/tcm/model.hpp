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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tcm {

struct Feature {
    std::string id;
    std::optional<std::string> description;

    bool operator==(const Feature&) const = default;
};

// A labeled test. `covers` lists the feature ids the test is declared to
// validate; order is preserved as written but treated as a set.
struct TestCase {
    std::string id;
    std::string name;
    double cost = 1.0;
    std::vector<std::string> covers;
    std::optional<std::string> body;

    bool operator==(const TestCase&) const = default;
};

struct TestSuite {
    std::vector<TestCase> tests;
    std::vector<Feature> features;

    // Throws ValidationError naming the first offending id.
    void validate() const;

    const TestCase* find_test(const std::string& id) const;

    bool operator==(const TestSuite&) const = default;
};

// Feature-by-test incidence. Rows follow feature declaration order, columns
// follow test declaration order.
class CoverageMatrix {
public:
    CoverageMatrix() = default;

    // Direct construction from rows of incidence (incidence[j][i] true iff
    // test i covers feature j). Throws ValidationError on shape or id errors.
    static CoverageMatrix from_incidence(std::vector<std::string> feature_ids, std::vector<std::string> test_ids,
                                         const std::vector<std::vector<bool>>& incidence, std::vector<double> costs);

    std::size_t num_features() const { return feature_order_.size(); }
    std::size_t num_tests() const { return test_order_.size(); }

    const std::vector<std::string>& feature_order() const { return feature_order_; }
    const std::vector<std::string>& test_order() const { return test_order_; }
    const std::vector<double>& costs() const { return costs_; }

    bool covers(std::size_t feature, std::size_t test) const {
        return incidence_[feature * test_order_.size() + test] != 0;
    }

    // Column indices of the tests covering `feature` (the covering set S_j).
    const std::vector<std::size_t>& covering_tests(std::size_t feature) const {
        return covering_[feature];
    }

    std::optional<std::size_t> test_index(const std::string& id) const;

    friend CoverageMatrix build_coverage_matrix(const TestSuite& suite);

private:
    std::vector<std::string> feature_order_;
    std::vector<std::string> test_order_;
    std::vector<unsigned char> incidence_;  // row-major, features x tests
    std::vector<double> costs_;
    std::vector<std::vector<std::size_t>> covering_;
};

CoverageMatrix build_coverage_matrix(const TestSuite& suite);

// Ids of features no test covers, in row order.
std::vector<std::string> uncoverable_features(const CoverageMatrix& matrix);

}  // namespace tcm
