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
#include <optional>
#include <string>
#include <vector>

#include "tcm/model.hpp"
#include "tcm/solvers.hpp"

namespace tcm {

struct CostModel {
    enum class Kind { kUnit, kUniform } kind = Kind::kUnit;
    double lo = 1.0;
    double hi = 1.0;

    static CostModel unit() { return {}; }
    static CostModel uniform(double lo, double hi) { return {Kind::kUniform, lo, hi}; }
};

struct InstanceSpec {
    std::size_t n_tests = 0;
    std::size_t m_features = 0;
    double redundancy = 1.0;  // average covering tests per feature
    bool single_label = false;
    CostModel cost_model;
    std::uint64_t seed = 0;

    // Throws ValidationError explaining the violated bound.
    void validate() const;
    // Stable label used as the CSV instance column.
    std::string name() const;
};

// Random labeled suite with no uncoverable features; deterministic in the
// seed. Multi-label mode gives each feature floor/ceil(redundancy) distinct
// covering tests; single-label mode partitions the tests among features.
TestSuite gen_instance(const InstanceSpec& spec);

struct BenchRow {
    std::string instance;
    std::string solver;
    std::size_t n = 0;
    std::size_t m = 0;
    double median_wall_time = 0.0;  // seconds
    double best_energy = 0.0;
    std::optional<bool> optimum_found;  // empty when no oracle was run
    std::size_t repetitions = 1;
};

struct BenchOptions {
    std::size_t repetitions = 1;
    AnnealParams anneal;
    double lambda_multiplier = 2.0;
    std::size_t exact_cap = kDefaultExactCap;
    bool parallel_instances = false;
};

// Rows sorted by (instance, solver).
std::vector<BenchRow> run_benchmark(const std::vector<InstanceSpec>& specs,
                                    const std::vector<SolverKind>& solvers, const BenchOptions& options);

inline constexpr const char* kBenchCsvHeader = "instance,solver,n,m,median_ms,best_energy,optimum_found";

// `with_timing` false writes 0 for median_ms so output is reproducible.
std::string bench_csv(const std::vector<BenchRow>& rows, bool with_timing = true);

// 100 * (baseline - treated) / baseline, rounded to one decimal place.
double improvement_percent(double baseline, double treated);

double speedup_ratio(double slow_seconds, double fast_seconds);

struct ComparisonRow {
    std::string metric;
    double baseline = 0.0;
    double treated = 0.0;
};

// Metric / Baseline / TDD / Improvement table.
std::string comparison_table(const std::vector<ComparisonRow>& rows);

}  // namespace tcm
