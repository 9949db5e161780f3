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
#include <string>

#include "tcm/model.hpp"
#include "tcm/qubo.hpp"

namespace tcm {

struct SolveStats {
    double wall_time = 0.0;  // seconds
    std::uint64_t sweeps_or_steps = 0;
    std::uint64_t restarts = 0;
    std::uint64_t seed = 0;
};

struct SolveResult {
    Assignment assignment;
    double energy = 0.0;
    SolveStats stats;
};

struct AnnealParams {
    std::uint64_t sweeps = 2000;
    double t_init = 10.0;
    double t_final = 0.01;
    std::uint64_t restarts = 8;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr std::size_t kDefaultExactCap = 24;

// Enumerates all 2^n assignments. Ties go to the lexicographically smallest
// bit vector (x0 compared first, 0 before 1).
SolveResult exact_solve(const QuboModel& model, std::size_t max_vars = kDefaultExactCap);

// Seed used by restart `restart` of a run seeded with `seed` (splitmix64 of
// seed + golden-ratio increment * (restart + 1)).
std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t restart);

// Sweep-based Metropolis annealing with a geometric schedule. `workers` > 1
// runs restarts on that many threads; results match serial execution.
SolveResult simulated_annealing(const QuboModel& model, const AnnealParams& params,
                                unsigned workers = 1);

// Weighted greedy set cover over the matrix, scored against `model` (which
// must have been built from the same matrix).
SolveResult greedy_cover(const CoverageMatrix& matrix, const QuboModel& model);

// Convenience overload scoring against build_qubo(matrix, QuboConfig{}).
SolveResult greedy_cover(const CoverageMatrix& matrix);

enum class SolverKind { kAnneal, kExact, kGreedy };

std::string to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);

}  // namespace tcm
