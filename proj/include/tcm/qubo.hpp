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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tcm/model.hpp"

namespace tcm {

// Binary decision vector; bits[i] == 1 selects variable (test) i.
struct Assignment {
    std::vector<std::uint8_t> bits;

    Assignment() = default;
    explicit Assignment(std::size_t n) : bits(n, 0) {}
    explicit Assignment(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    std::size_t size() const { return bits.size(); }
    bool operator[](std::size_t i) const { return bits[i] != 0; }
    void flip(std::size_t i) { bits[i] ^= 1U; }

    bool operator==(const Assignment&) const = default;
};

using PairKey = std::pair<std::size_t, std::size_t>;

// E(x) = offset + sum_i linear[i] x_i + sum_{i<j} quadratic[(i,j)] x_i x_j
//
// The quadratic map only ever holds keys with i < j and nonzero values. A
// symmetric adjacency view is kept alongside for O(degree) flip deltas.
class QuboModel {
public:
    QuboModel() = default;

    // Throws ValidationError on bad keys, non-finite values or a name/size
    // mismatch. Zero quadratic entries are dropped. Empty `names` are
    // synthesized as x0..x{n-1}.
    QuboModel(std::vector<double> linear, std::map<PairKey, double> quadratic, double offset,
              std::vector<std::string> names = {});

    std::size_t size() const { return linear_.size(); }
    const std::vector<double>& linear() const { return linear_; }
    const std::map<PairKey, double>& quadratic() const { return quadratic_; }
    double offset() const { return offset_; }
    const std::vector<std::string>& var_names() const { return names_; }

    // Neighbours of i with their coupling, in ascending index order.
    std::span<const std::pair<std::size_t, double>> neighbours(std::size_t i) const {
        return adjacency_[i];
    }

    // Feature ids that were left out of the penalty because no test covers them.
    const std::vector<std::string>& skipped_features() const { return skipped_; }
    void set_skipped_features(std::vector<std::string> ids) { skipped_ = std::move(ids); }

    // Structural equality; skipped-feature metadata is not part of the model.
    bool operator==(const QuboModel& other) const {
        return linear_ == other.linear_ && quadratic_ == other.quadratic_ &&
               offset_ == other.offset_ && names_ == other.names_;
    }

private:
    std::vector<double> linear_;
    std::map<PairKey, double> quadratic_;
    double offset_ = 0.0;
    std::vector<std::string> names_;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
    std::vector<std::string> skipped_;
};

struct ExplicitLambda {
    double value;
};

struct AutoLambda {
    double multiplier = 2.0;
};

struct QuboConfig {
    std::variant<ExplicitLambda, AutoLambda> lambda = AutoLambda{};
    bool exclude_uncoverable = true;

    void validate() const;
};

// max(multiplier * max(costs), 1.0). The result strictly exceeds the saving
// from dropping any single test.
double auto_lambda(std::span<const double> costs, double multiplier);

// Resolves the penalty weight a config implies for the given matrix.
double resolve_lambda(const CoverageMatrix& matrix, const QuboConfig& config);

// Cost term plus one squared penalty (1 - sum_{i in S_j} x_i)^2 per feature,
// expanded with x^2 = x into linear/quadratic/offset form.
QuboModel build_qubo(const CoverageMatrix& matrix, const QuboConfig& config);

double energy(const QuboModel& model, const Assignment& x);

// E(x with bit i flipped) - E(x).
double flip_delta(const QuboModel& model, const Assignment& x, std::size_t i);

// Line-oriented exchange text; see README for the grammar.
std::string export_qubo(const QuboModel& model);
QuboModel import_qubo(std::string_view text);

// Shortest text that parses back to the same double.
std::string format_real(double v);

}  // namespace tcm
