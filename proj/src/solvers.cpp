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

#include "tcm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "tcm/error.hpp"

namespace tcm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Local field L[i] + sum_j Q~[i][j] x_j, without flip_delta's argument checks.
double local_field(const QuboModel& model, const Assignment& x, std::size_t i) {
    double field = model.linear()[i];
    for (const auto& [j, q] : model.neighbours(i))
        if (x[j]) field += q;
    return field;
}

bool improves(double candidate, double incumbent) {
    return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void AnnealParams::validate() const {
    if (sweeps < 1) throw ValidationError("anneal sweeps must be at least 1");
    if (restarts < 1) throw ValidationError("anneal restarts must be at least 1");
    if (!(t_final > 0.0) || !(t_init > t_final) || !std::isfinite(t_init))
        throw ValidationError("anneal temperatures must satisfy t_init > t_final > 0");
}

SolveResult exact_solve(const QuboModel& model, std::size_t max_vars) {
    const std::size_t n = model.size();
    if (n > max_vars || n >= 63)
        throw SolverError("exact solver is capped at " + std::to_string(max_vars) +
                          " variables (model has " + std::to_string(n) +
                          "); use simulated annealing instead");
    const auto start = Clock::now();

    // Codes are visited in increasing order with x0 as the most significant
    // bit, so the first assignment reaching the minimum is the lexicographic
    // smallest. Code bit b maps to variable n-1-b.
    Assignment x(n);
    double e = model.offset();
    Assignment best = x;
    double best_e = e;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t code = 1; code < total; ++code) {
        const std::uint64_t changed = code ^ (code - 1);
        for (std::size_t b = 0; (changed >> b) != 0; ++b) {
            const std::size_t v = n - 1 - b;
            const double field = local_field(model, x, v);
            e += x[v] ? -field : field;
            x.flip(v);
        }
        if ((code & 0xFFF) == 0) e = energy(model, x);
        if (improves(e, best_e)) {
            best_e = e;
            best = x;
        }
    }

    SolveResult r;
    r.energy = energy(model, best);
    r.assignment = std::move(best);
    r.stats.wall_time = seconds_since(start);
    r.stats.sweeps_or_steps = total;
    r.stats.restarts = 1;
    return r;
}

std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t restart) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (restart + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

struct RestartOutcome {
    Assignment best;
    double energy = std::numeric_limits<double>::infinity();
};

RestartOutcome anneal_once(const QuboModel& model, const AnnealParams& p, std::uint64_t restart) {
    const std::size_t n = model.size();
    std::mt19937_64 rng(restart_seed(p.seed, restart));

    Assignment x(n);
    for (std::size_t i = 0; i < n; ++i) x.bits[i] = static_cast<std::uint8_t>(rng() >> 63);
    double e = energy(model, x);
    RestartOutcome out{x, e};

    const double ratio = p.t_final / p.t_init;
    for (std::uint64_t k = 0; k < p.sweeps; ++k) {
        const double frac =
            p.sweeps > 1 ? static_cast<double>(k) / static_cast<double>(p.sweeps - 1) : 0.0;
        const double temp = p.t_init * std::pow(ratio, frac);
        for (std::size_t i = 0; i < n; ++i) {
            const double field = local_field(model, x, i);
            const double delta = x[i] ? -field : field;
            if (delta <= 0.0 || unit_uniform(rng) < std::exp(-delta / temp)) {
                x.flip(i);
                e += delta;
                if (improves(e, out.energy)) {
                    out.energy = e;
                    out.best = x;
                }
            }
        }
        e = energy(model, x);
    }
    out.energy = energy(model, out.best);
    return out;
}

}  // namespace

SolveResult simulated_annealing(const QuboModel& model, const AnnealParams& params,
                                unsigned workers) {
    params.validate();
    if (model.size() == 0) throw ValidationError("simulated annealing needs at least one variable");
    const auto start = Clock::now();

    std::vector<RestartOutcome> outcomes(params.restarts);
    if (workers <= 1 || params.restarts == 1) {
        for (std::uint64_t r = 0; r < params.restarts; ++r) outcomes[r] = anneal_once(model, params, r);
    } else {
        std::vector<std::jthread> pool;
        const unsigned count = static_cast<unsigned>(
            std::min<std::uint64_t>(workers, params.restarts));
        for (unsigned w = 0; w < count; ++w)
            pool.emplace_back([&, w] {
                for (std::uint64_t r = w; r < params.restarts; r += count)
                    outcomes[r] = anneal_once(model, params, r);
            });
    }

    std::size_t winner = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r)
        if (outcomes[r].energy < outcomes[winner].energy) winner = r;

    SolveResult result;
    result.assignment = std::move(outcomes[winner].best);
    result.energy = outcomes[winner].energy;
    result.stats.wall_time = seconds_since(start);
    result.stats.sweeps_or_steps = params.sweeps * params.restarts;
    result.stats.restarts = params.restarts;
    result.stats.seed = params.seed;
    return result;
}

SolveResult greedy_cover(const CoverageMatrix& matrix, const QuboModel& model) {
    if (model.size() != matrix.num_tests())
        throw ValidationError("greedy_cover: model and matrix disagree on test count");
    const auto missing = uncoverable_features(matrix);
    if (!missing.empty())
        throw SolverError("greedy cover cannot cover feature '" + missing.front() + "'");
    const auto start = Clock::now();

    const std::size_t n = matrix.num_tests();
    const std::size_t m = matrix.num_features();
    std::vector<bool> covered(m, false);
    std::size_t remaining = m;
    Assignment x(n);
    std::uint64_t picks = 0;

    while (remaining > 0) {
        std::size_t best = n;
        double best_ratio = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i]) continue;
            std::size_t fresh = 0;
            for (std::size_t j = 0; j < m; ++j)
                if (!covered[j] && matrix.covers(j, i)) ++fresh;
            if (fresh == 0) continue;
            const double cost = matrix.costs()[i];
            const double ratio = cost > 0.0 ? static_cast<double>(fresh) / cost
                                            : std::numeric_limits<double>::infinity();
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = i;
            }
        }
        x.bits[best] = 1;
        ++picks;
        for (std::size_t j = 0; j < m; ++j)
            if (!covered[j] && matrix.covers(j, best)) {
                covered[j] = true;
                --remaining;
            }
    }

    SolveResult r;
    r.energy = energy(model, x);
    r.assignment = std::move(x);
    r.stats.wall_time = seconds_since(start);
    r.stats.sweeps_or_steps = picks;
    r.stats.restarts = 1;
    return r;
}

SolveResult greedy_cover(const CoverageMatrix& matrix) {
    QuboConfig config;
    if (matrix.num_tests() == 0) config.lambda = ExplicitLambda{1.0};  // auto λ needs costs
    return greedy_cover(matrix, build_qubo(matrix, config));
}

std::string to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::kAnneal: return "sa";
        case SolverKind::kExact: return "exact";
        case SolverKind::kGreedy: return "greedy";
    }
    return "?";
}

SolverKind parse_solver_kind(const std::string& name) {
    if (name == "sa") return SolverKind::kAnneal;
    if (name == "exact") return SolverKind::kExact;
    if (name == "greedy") return SolverKind::kGreedy;
    throw ValidationError("unknown solver '" + name + "' (expected sa, exact or greedy)");
}

}  // namespace tcm
