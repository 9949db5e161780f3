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

#include <catch2/catch_amalgamated.hpp>

#include "tcm/bench.hpp"
#include "tcm/error.hpp"
#include "tcm/qubo.hpp"

using namespace tcm;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("gen_instance is deterministic and fully coverable", "[bench]") {
    InstanceSpec spec{.n_tests = 5, .m_features = 3, .redundancy = 1.5, .seed = 7};
    const auto a = gen_instance(spec);
    CHECK(a == gen_instance(spec));
    const auto matrix = build_coverage_matrix(a);
    CHECK(uncoverable_features(matrix).empty());
    CHECK(matrix.num_tests() == 5);

    spec.seed = 8;
    CHECK_FALSE(gen_instance(spec) == a);
}

TEST_CASE("gen_instance bounds", "[bench]") {
    REQUIRE_THROWS_WITH(gen_instance({.n_tests = 3, .m_features = 5, .single_label = true}),
                        ContainsSubstring("n_tests >= m_features"));
    CHECK_THROWS_AS(gen_instance({.n_tests = 3, .m_features = 2, .redundancy = 4.0}), ValidationError);
    CHECK_THROWS_AS(gen_instance({.n_tests = 10, .m_features = 2, .redundancy = 2.0}), ValidationError);
    CHECK_THROWS_AS(gen_instance({.n_tests = 4, .m_features = 2, .redundancy = 0.5}), ValidationError);
    CHECK_THROWS_AS(gen_instance({.n_tests = 0, .m_features = 0}), ValidationError);
    CHECK_THROWS_AS(gen_instance({.n_tests = 4, .m_features = 2, .cost_model = CostModel::uniform(3.0, 1.0)}),
                    ValidationError);
}

TEST_CASE("gen_instance covering-set sizes", "[bench][property]") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const bool single = seed % 2 == 0;
        const std::size_t m = 2 + seed % 7;
        const std::size_t n = m + seed % 11;
        const double redundancy = single ? 1.0 : std::max(1.0, static_cast<double>(n) / m + (seed % 3) * 0.5);
        InstanceSpec spec{.n_tests = n, .m_features = m, .redundancy = redundancy, .single_label = single,
                          .cost_model = seed % 3 ? CostModel::unit() : CostModel::uniform(0.5, 2.0), .seed = seed};
        if (!single && std::ceil(redundancy) > static_cast<double>(n)) continue;
        const auto suite = gen_instance(spec);
        suite.validate();
        const auto matrix = build_coverage_matrix(suite);
        REQUIRE(uncoverable_features(matrix).empty());

        const double target = single ? static_cast<double>(n) / m : redundancy;
        for (std::size_t j = 0; j < m; ++j) {
            const auto size = static_cast<double>(matrix.covering_tests(j).size());
            REQUIRE(size >= std::floor(target));
            REQUIRE(size <= std::ceil(target));
        }
        for (const auto& t : suite.tests) {
            if (single) REQUIRE(t.covers.size() == 1);
            if (spec.cost_model.kind == CostModel::Kind::kUniform) {
                REQUIRE(t.cost >= 0.5);
                REQUIRE(t.cost <= 2.0);
            } else {
                REQUIRE(t.cost == 1.0);
            }
        }
    }
}

TEST_CASE("run_benchmark on a small instance", "[bench]") {
    InstanceSpec spec{.n_tests = 12, .m_features = 6, .redundancy = 2.0, .seed = 0};
    BenchOptions options;
    options.repetitions = 2;
    const auto rows = run_benchmark({spec}, {SolverKind::kExact, SolverKind::kAnneal, SolverKind::kGreedy}, options);
    REQUIRE(rows.size() == 3);
    // Sorted by (instance, solver).
    CHECK(rows[0].solver == "exact");
    CHECK(rows[1].solver == "greedy");
    CHECK(rows[2].solver == "sa");
    for (const auto& r : rows) {
        CHECK(r.best_energy == rows[0].best_energy);
        CHECK(r.optimum_found == std::optional<bool>(true));
        CHECK(r.n == 12);
        CHECK(r.m == 6);
        CHECK(r.repetitions == 2);
    }

    options.repetitions = 0;
    CHECK_THROWS_AS(run_benchmark({spec}, {SolverKind::kExact}, options), ValidationError);
}

TEST_CASE("benchmark CSV", "[bench]") {
    std::vector<InstanceSpec> specs{{.n_tests = 8, .m_features = 4, .redundancy = 2.0, .seed = 3},
                                    {.n_tests = 6, .m_features = 3, .redundancy = 2.0, .seed = 1}};
    BenchOptions options;
    options.parallel_instances = true;
    const auto rows = run_benchmark(specs, {SolverKind::kGreedy, SolverKind::kExact}, options);
    const auto csv = bench_csv(rows, false);
    CHECK(csv.starts_with("instance,solver,n,m,median_ms,best_energy,optimum_found\n"));
    CHECK(csv ==
          "instance,solver,n,m,median_ms,best_energy,optimum_found\n"
          "n6-m3-r2-ml-s1,exact,6,3,0.000,3,true\n"
          "n6-m3-r2-ml-s1,greedy,6,3,0.000,3,true\n"
          "n8-m4-r2-ml-s3,exact,8,4,0.000,4,true\n"
          "n8-m4-r2-ml-s3,greedy,8,4,0.000,4,true\n");
    CHECK(bench_csv(run_benchmark(specs, {SolverKind::kGreedy, SolverKind::kExact}, {}), false) == csv);

    BenchOptions no_oracle;
    no_oracle.exact_cap = 4;
    const auto unknown = run_benchmark({specs[0]}, {SolverKind::kGreedy}, no_oracle);
    CHECK_FALSE(unknown[0].optimum_found.has_value());
    CHECK(bench_csv(unknown, false).ends_with(",4,\n"));
}

TEST_CASE("improvement_percent", "[bench]") {
    CHECK(improvement_percent(897.75, 570.25) == 36.5);
    CHECK(improvement_percent(27.75, 20.50) == 26.1);
    CHECK(improvement_percent(40.23, 18.38) == 54.3);
    CHECK(improvement_percent(5.0, 5.0) == 0.0);
    CHECK(improvement_percent(5.0, 0.0) == 100.0);
    CHECK(improvement_percent(10.0, 15.0) == -50.0);
    CHECK_THROWS_AS(improvement_percent(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(improvement_percent(-1.0, 1.0), ValidationError);
}

TEST_CASE("speedup_ratio", "[bench]") {
    CHECK(speedup_ratio(0.0655, 0.004008) > 16.0);
    CHECK(speedup_ratio(0.0655, 0.004008) == Catch::Approx(16.342).epsilon(1e-4));
    CHECK(speedup_ratio(1.0, 1.0) == 1.0);
    CHECK(speedup_ratio(2.0, 0.5) == 4.0);
    CHECK_THROWS_AS(speedup_ratio(1.0, 0.0), ValidationError);
}

TEST_CASE("comparison table layout", "[bench]") {
    const auto table = comparison_table({{"Total Tokens", 897.75, 570.25}, {"Complexity Score", 27.75, 20.50}});
    CHECK(table ==
          "Metric                Baseline           TDD  Improvement\n"
          "Total Tokens            897.75        570.25        36.5%\n"
          "Complexity Score         27.75         20.50        26.1%\n");
}
