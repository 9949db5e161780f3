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

// Test-only generators and brute-force oracles. Everything here works from
// TestSuite directly with bitmasks, never through CoverageMatrix or QuboModel,
// so it stays independent of the code under test.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "tcm/model.hpp"
#include "tcm/qubo.hpp"

namespace tcm::testing {

inline std::string fixture(const std::string& rel) { return std::string(TCM_FIXTURE_DIR) + "/" + rel; }

inline TestSuite inst_a() {
    TestSuite s;
    s.features = {{"f1", std::nullopt}, {"f2", std::nullopt}, {"f3", std::nullopt}};
    s.tests = {{"t1", "t1", 1.0, {"f1"}, std::nullopt},
               {"t2", "t2", 1.0, {"f1"}, std::nullopt},
               {"t3", "t3", 1.0, {"f2"}, std::nullopt},
               {"t4", "t4", 1.0, {"f2", "f3"}, std::nullopt},
               {"t5", "t5", 1.0, {"f3"}, std::nullopt}};
    return s;
}

struct RandomSuiteOptions {
    std::size_t max_tests = 16;
    std::size_t max_features = 8;
    bool single_label = false;
    bool unit_costs = false;
    // Chance that an extra never-covered feature is declared.
    double uncoverable_rate = 0.0;
};

// Costs are multiples of 1/8 in [0, 4] so every sum the oracles form is
// exact in double precision.
inline TestSuite random_suite(std::mt19937_64& rng, const RandomSuiteOptions& opt) {
    std::uniform_int_distribution<std::size_t> n_dist(1, opt.max_tests);
    const std::size_t n = n_dist(rng);
    std::uniform_int_distribution<std::size_t> m_dist(1, std::min(opt.max_features, opt.single_label ? n : opt.max_features));
    const std::size_t m = m_dist(rng);
    std::uniform_int_distribution<int> cost_dist(0, 32);
    std::bernoulli_distribution extra_label(0.3);
    std::uniform_int_distribution<std::size_t> feat(0, m - 1);

    TestSuite s;
    for (std::size_t j = 0; j < m; ++j) s.features.push_back({"f" + std::to_string(j), std::nullopt});
    for (std::size_t i = 0; i < n; ++i) {
        TestCase t;
        t.id = "t" + std::to_string(i);
        t.name = "test " + std::to_string(i);
        t.cost = opt.unit_costs ? 1.0 : cost_dist(rng) / 8.0;
        std::vector<bool> has(m, false);
        has[feat(rng)] = true;
        if (!opt.single_label)
            while (extra_label(rng)) has[feat(rng)] = true;
        for (std::size_t j = 0; j < m; ++j)
            if (has[j]) t.covers.push_back(s.features[j].id);
        s.tests.push_back(std::move(t));
    }
    if (std::bernoulli_distribution(opt.uncoverable_rate)(rng))
        s.features.push_back({"orphan", std::nullopt});
    return s;
}

// Removes features no test covers.
inline TestSuite drop_uncoverable(TestSuite s) {
    std::erase_if(s.features, [&](const Feature& f) {
        return std::none_of(s.tests.begin(), s.tests.end(), [&](const TestCase& t) {
            return std::find(t.covers.begin(), t.covers.end(), f.id) != t.covers.end();
        });
    });
    return s;
}

// Per-feature bitmask of covering tests (bit i = test i).
inline std::vector<std::uint64_t> cover_masks(const TestSuite& s) {
    std::vector<std::uint64_t> masks;
    for (const auto& f : s.features) {
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < s.tests.size(); ++i)
            if (std::find(s.tests[i].covers.begin(), s.tests[i].covers.end(), f.id) != s.tests[i].covers.end())
                mask |= std::uint64_t{1} << i;
        masks.push_back(mask);
    }
    return masks;
}

// sum_i c_i x_i + lambda sum_j (1 - |x & S_j|)^2 over coverable features.
inline double direct_objective(const TestSuite& s, const std::vector<std::uint64_t>& masks, double lambda,
                               std::uint64_t x) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.tests.size(); ++i)
        if ((x >> i) & 1U) e += s.tests[i].cost;
    for (std::uint64_t mask : masks) {
        if (mask == 0) continue;
        const double d = 1.0 - std::popcount(x & mask);
        e += lambda * d * d;
    }
    return e;
}

inline std::uint64_t to_mask(const Assignment& x) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) v |= std::uint64_t{1} << i;
    return v;
}

inline Assignment from_mask(std::uint64_t v, std::size_t n) {
    Assignment x(n);
    for (std::size_t i = 0; i < n; ++i) x.bits[i] = (v >> i) & 1U;
    return x;
}

// Minimum of the direct objective over all 2^n selections, using split
// lookup tables for the cost sum so n = 20 stays fast.
inline double brute_force_minimum(const TestSuite& s, double lambda) {
    const std::size_t n = s.tests.size();
    const auto masks = cover_masks(s);
    const std::size_t lo_bits = n / 2, hi_bits = n - lo_bits;
    std::vector<double> lo_cost(std::size_t{1} << lo_bits, 0.0), hi_cost(std::size_t{1} << hi_bits, 0.0);
    for (std::size_t v = 1; v < lo_cost.size(); ++v) {
        const int b = std::countr_zero(v);
        lo_cost[v] = lo_cost[v & (v - 1)] + s.tests[b].cost;
    }
    for (std::size_t v = 1; v < hi_cost.size(); ++v) {
        const int b = std::countr_zero(v);
        hi_cost[v] = hi_cost[v & (v - 1)] + s.tests[lo_bits + b].cost;
    }
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t lo_mask = (std::uint64_t{1} << lo_bits) - 1;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        double e = lo_cost[x & lo_mask] + hi_cost[x >> lo_bits];
        for (std::uint64_t mask : masks) {
            if (mask == 0) continue;
            const double d = 1.0 - std::popcount(x & mask);
            e += lambda * d * d;
        }
        best = std::min(best, e);
    }
    return best;
}

// Minimum cost of a selection covering every coverable feature.
inline double set_cover_optimum(const TestSuite& s) {
    const std::size_t n = s.tests.size();
    const auto masks = cover_masks(s);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        bool ok = true;
        for (std::uint64_t mask : masks)
            if (mask != 0 && (x & mask) == 0) {
                ok = false;
                break;
            }
        if (!ok) continue;
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((x >> i) & 1U) c += s.tests[i].cost;
        best = std::min(best, c);
    }
    return best;
}

inline bool covers_all_coverable(const TestSuite& s, std::uint64_t x) {
    for (std::uint64_t mask : cover_masks(s))
        if (mask != 0 && (x & mask) == 0) return false;
    return true;
}

// Random model with arbitrary-precision reals, for round-trip checks.
inline QuboModel random_model(std::mt19937_64& rng, std::size_t max_n = 12) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_n)(rng);
    std::uniform_real_distribution<double> coef(-100.0, 100.0);
    std::bernoulli_distribution present(0.4);
    std::vector<double> linear(n, 0.0);
    for (auto& v : linear)
        if (present(rng)) v = coef(rng);
    std::map<PairKey, double> quad;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (present(rng)) quad[{i, j}] = coef(rng);
    return QuboModel(std::move(linear), std::move(quad), coef(rng));
}

}  // namespace tcm::testing
