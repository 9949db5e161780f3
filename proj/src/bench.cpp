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

#include "tcm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <tuple>

#include "tcm/error.hpp"
#include "tcm/qubo.hpp"

namespace tcm {

namespace {

// Portable draws: the std distributions are implementation-defined, and
// instances must be identical across standard libraries.
std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_below(rng, i)]);
}

std::size_t total_incidences(const InstanceSpec& s) {
    if (s.single_label) return s.n_tests;
    const double floor_r = std::floor(s.redundancy);
    const auto ceil_count = static_cast<std::size_t>(std::llround((s.redundancy - floor_r) * s.m_features));
    return static_cast<std::size_t>(floor_r) * s.m_features + ceil_count;
}

}  // namespace

void InstanceSpec::validate() const {
    if (n_tests == 0 || m_features == 0)
        throw ValidationError("instance needs at least one test and one feature");
    if (!(redundancy >= 1.0) || !std::isfinite(redundancy))
        throw ValidationError("redundancy must be a finite number >= 1");
    if (cost_model.kind == CostModel::Kind::kUniform &&
        !(cost_model.lo >= 0.0 && cost_model.lo <= cost_model.hi && std::isfinite(cost_model.hi)))
        throw ValidationError("uniform cost bounds must satisfy 0 <= lo <= hi");
    if (single_label) {
        if (m_features > n_tests)
            throw ValidationError("single-label instance needs n_tests >= m_features (" +
                                  std::to_string(n_tests) + " tests cannot each cover a distinct one of " +
                                  std::to_string(m_features) + " features)");
        return;
    }
    if (std::ceil(redundancy) > static_cast<double>(n_tests))
        throw ValidationError("redundancy " + format_real(redundancy) + " needs more than the " +
                              std::to_string(n_tests) + " available tests per feature");
    if (total_incidences(*this) < n_tests)
        throw ValidationError("redundancy * m_features = " + std::to_string(total_incidences(*this)) +
                              " labels is fewer than the " + std::to_string(n_tests) +
                              " tests that each need one");
}

std::string InstanceSpec::name() const {
    std::string s = "n" + std::to_string(n_tests) + "-m" + std::to_string(m_features) + "-r" +
                    format_real(redundancy) + (single_label ? "-sl" : "-ml");
    if (cost_model.kind == CostModel::Kind::kUniform)
        s += "-u" + format_real(cost_model.lo) + "_" + format_real(cost_model.hi);
    return s + "-s" + std::to_string(seed);
}

TestSuite gen_instance(const InstanceSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const std::size_t n = spec.n_tests;
    const std::size_t m = spec.m_features;

    // Covering-set size per feature.
    std::vector<std::size_t> counts(m);
    if (spec.single_label) {
        for (std::size_t j = 0; j < m; ++j) counts[j] = n / m + (j < n % m ? 1 : 0);
    } else {
        const auto base = static_cast<std::size_t>(std::floor(spec.redundancy));
        const std::size_t extra = total_incidences(spec) - base * m;
        for (std::size_t j = 0; j < m; ++j) counts[j] = base + (j < extra ? 1 : 0);
    }
    shuffle(counts, rng);

    std::vector<std::size_t> slots;
    for (std::size_t j = 0; j < m; ++j) slots.insert(slots.end(), counts[j], j);
    shuffle(slots, rng);

    // The first n slots give every test one label; later slots add labels to
    // tests not yet covering that feature.
    std::vector<std::vector<bool>> labels(n, std::vector<bool>(m, false));
    for (std::size_t k = 0; k < n; ++k) labels[k][slots[k]] = true;
    for (std::size_t k = n; k < slots.size(); ++k) {
        const std::size_t j = slots[k];
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
            if (!labels[i][j]) free.push_back(i);
        labels[free[draw_below(rng, free.size())]][j] = true;
    }

    TestSuite suite;
    for (std::size_t j = 0; j < m; ++j) suite.features.push_back({"f" + std::to_string(j + 1), std::nullopt});
    for (std::size_t i = 0; i < n; ++i) {
        TestCase t;
        t.id = "t" + std::to_string(i + 1);
        t.name = t.id;
        if (spec.cost_model.kind == CostModel::Kind::kUniform)
            t.cost = spec.cost_model.lo + (spec.cost_model.hi - spec.cost_model.lo) * draw_unit(rng);
        for (std::size_t j = 0; j < m; ++j)
            if (labels[i][j]) t.covers.push_back(suite.features[j].id);
        suite.tests.push_back(std::move(t));
    }
    return suite;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::vector<BenchRow> bench_instance(const InstanceSpec& spec, const std::vector<SolverKind>& solvers,
                                     const BenchOptions& options) {
    const auto suite = gen_instance(spec);
    const auto matrix = build_coverage_matrix(suite);
    QuboConfig config;
    config.lambda = AutoLambda{options.lambda_multiplier};
    const auto model = build_qubo(matrix, config);

    std::optional<double> optimum;
    if (model.size() <= options.exact_cap) optimum = exact_solve(model, options.exact_cap).energy;

    std::vector<BenchRow> rows;
    for (SolverKind kind : solvers) {
        BenchRow row;
        row.instance = spec.name();
        row.solver = to_string(kind);
        row.n = matrix.num_tests();
        row.m = matrix.num_features();
        row.repetitions = options.repetitions;
        row.best_energy = std::numeric_limits<double>::infinity();
        std::vector<double> times;
        for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            SolveResult r;
            switch (kind) {
                case SolverKind::kExact: r = exact_solve(model, options.exact_cap); break;
                case SolverKind::kAnneal: r = simulated_annealing(model, options.anneal); break;
                case SolverKind::kGreedy: r = greedy_cover(matrix, model); break;
            }
            times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
            row.best_energy = std::min(row.best_energy, r.energy);
        }
        row.median_wall_time = median(times);
        if (optimum)
            row.optimum_found = std::abs(row.best_energy - *optimum) <= 1e-9 * std::max(1.0, std::abs(*optimum));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const std::vector<InstanceSpec>& specs,
                                    const std::vector<SolverKind>& solvers, const BenchOptions& options) {
    if (options.repetitions == 0) throw ValidationError("benchmark repetitions must be at least 1");
    options.anneal.validate();
    for (const auto& s : specs) s.validate();

    std::vector<std::vector<BenchRow>> per_spec(specs.size());
    if (options.parallel_instances && specs.size() > 1) {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(specs.size());
        for (std::size_t k = 0; k < specs.size(); ++k)
            pool.emplace_back([&, k] {
                try {
                    per_spec[k] = bench_instance(specs[k], solvers, options);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        pool.clear();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t k = 0; k < specs.size(); ++k) per_spec[k] = bench_instance(specs[k], solvers, options);
    }

    std::vector<BenchRow> rows;
    for (auto& v : per_spec) rows.insert(rows.end(), v.begin(), v.end());
    std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.instance, a.solver) < std::tie(b.instance, b.solver);
    });
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows, bool with_timing) {
    std::string out = std::string(kBenchCsvHeader) + "\n";
    for (const auto& r : rows) {
        char ms[32];
        std::snprintf(ms, sizeof(ms), "%.3f", with_timing ? r.median_wall_time * 1e3 : 0.0);
        out += r.instance + "," + r.solver + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + ms +
               "," + format_real(r.best_energy) + "," +
               (r.optimum_found ? (*r.optimum_found ? "true" : "false") : "") + "\n";
    }
    return out;
}

double improvement_percent(double baseline, double treated) {
    if (!(baseline > 0.0)) throw ValidationError("improvement baseline must be positive");
    return std::round(1000.0 * (baseline - treated) / baseline) / 10.0;
}

double speedup_ratio(double slow_seconds, double fast_seconds) {
    if (!(fast_seconds > 0.0)) throw ValidationError("speedup denominator must be positive");
    return slow_seconds / fast_seconds;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.metric.size());
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-*s  %12s  %12s  %11s\n", static_cast<int>(width), "Metric", "Baseline",
                  "TDD", "Improvement");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%-*s  %12.2f  %12.2f  %10.1f%%\n", static_cast<int>(width),
                      r.metric.c_str(), r.baseline, r.treated, improvement_percent(r.baseline, r.treated));
        out += line;
    }
    return out;
}

}  // namespace tcm
