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

#include "tcm/qubo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <system_error>

#include "tcm/error.hpp"

namespace tcm {

QuboModel::QuboModel(std::vector<double> linear, std::map<PairKey, double> quadratic,
                     double offset, std::vector<std::string> names)
    : linear_(std::move(linear)), offset_(offset), names_(std::move(names)) {
    const std::size_t n = linear_.size();
    if (!std::isfinite(offset_)) throw ValidationError("qubo offset is not finite");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(linear_[i]))
            throw ValidationError("qubo linear coefficient " + std::to_string(i) + " is not finite");
    if (names_.empty()) {
        names_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) names_.push_back("x" + std::to_string(i));
    } else if (names_.size() != n) {
        throw ValidationError("qubo has " + std::to_string(n) + " variables but " +
                              std::to_string(names_.size()) + " names");
    }

    adjacency_.assign(n, {});
    for (const auto& [key, value] : quadratic) {
        const auto [i, j] = key;
        if (!(i < j && j < n))
            throw ValidationError("qubo pair (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") is not i < j < n");
        if (!std::isfinite(value)) throw ValidationError("qubo quadratic coefficient is not finite");
        if (value == 0.0) continue;
        quadratic_.emplace(key, value);
        adjacency_[i].emplace_back(j, value);
        adjacency_[j].emplace_back(i, value);
    }
    for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

void QuboConfig::validate() const {
    if (const auto* e = std::get_if<ExplicitLambda>(&lambda)) {
        if (!(e->value > 0.0) || !std::isfinite(e->value))
            throw ValidationError("explicit lambda must be a positive finite number");
    } else {
        const auto& a = std::get<AutoLambda>(lambda);
        if (!(a.multiplier > 1.0) || !std::isfinite(a.multiplier))
            throw ValidationError("lambda multiplier must be greater than 1");
    }
}

double auto_lambda(std::span<const double> costs, double multiplier) {
    if (costs.empty()) throw ValidationError("no tests");
    if (!(multiplier > 1.0)) throw ValidationError("lambda multiplier must be greater than 1");
    const double max_cost = *std::max_element(costs.begin(), costs.end());
    return std::max(multiplier * max_cost, 1.0);
}

double resolve_lambda(const CoverageMatrix& matrix, const QuboConfig& config) {
    config.validate();
    if (const auto* e = std::get_if<ExplicitLambda>(&config.lambda)) return e->value;
    return auto_lambda(matrix.costs(), std::get<AutoLambda>(config.lambda).multiplier);
}

QuboModel build_qubo(const CoverageMatrix& matrix, const QuboConfig& config) {
    const double lambda = resolve_lambda(matrix, config);

    auto missing = uncoverable_features(matrix);
    if (!missing.empty() && !config.exclude_uncoverable) {
        std::string ids;
        for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
        throw ValidationError("uncoverable features: " + ids);
    }

    const std::size_t n = matrix.num_tests();
    std::vector<double> linear(n, 0.0);
    std::map<PairKey, double> quadratic;
    double offset = 0.0;

    // lambda * (1 - sum x)^2 = lambda - lambda * sum x + 2 lambda * sum_{i<k} x_i x_k
    for (std::size_t j = 0; j < matrix.num_features(); ++j) {
        const auto& cover = matrix.covering_tests(j);
        if (cover.empty()) continue;
        offset += lambda;
        for (std::size_t a = 0; a < cover.size(); ++a) {
            linear[cover[a]] -= lambda;
            for (std::size_t b = a + 1; b < cover.size(); ++b)
                quadratic[{cover[a], cover[b]}] += 2.0 * lambda;
        }
    }
    for (std::size_t i = 0; i < n; ++i) linear[i] += matrix.costs()[i];

    QuboModel model(std::move(linear), std::move(quadratic), offset, matrix.test_order());
    model.set_skipped_features(std::move(missing));
    return model;
}

double energy(const QuboModel& model, const Assignment& x) {
    if (x.size() != model.size())
        throw ValidationError("assignment has " + std::to_string(x.size()) +
                              " bits but model has " + std::to_string(model.size()) + " variables");
    double e = model.offset();
    const auto& lin = model.linear();
    for (std::size_t i = 0; i < lin.size(); ++i)
        if (x[i]) e += lin[i];
    for (const auto& [key, value] : model.quadratic())
        if (x[key.first] && x[key.second]) e += value;
    return e;
}

double flip_delta(const QuboModel& model, const Assignment& x, std::size_t i) {
    if (i >= model.size())
        throw ValidationError("flip index " + std::to_string(i) + " out of range");
    if (x.size() != model.size()) throw ValidationError("assignment length mismatch");
    double field = model.linear()[i];
    for (const auto& [j, q] : model.neighbours(i))
        if (x[j]) field += q;
    return x[i] ? -field : field;
}

std::string format_real(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string export_qubo(const QuboModel& model) {
    std::string out = "# qubo n=" + std::to_string(model.size()) +
                      " offset=" + format_real(model.offset()) + "\n";
    const auto& lin = model.linear();
    for (std::size_t i = 0; i < lin.size(); ++i) {
        if (lin[i] == 0.0) continue;
        out += std::to_string(i) + " " + std::to_string(i) + " " + format_real(lin[i]) + "\n";
    }
    for (const auto& [key, value] : model.quadratic())
        out += std::to_string(key.first) + " " + std::to_string(key.second) + " " +
               format_real(value) + "\n";
    return out;
}

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw ParseError("qubo line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        if (pos > start) toks.push_back(line.substr(start, pos - start));
    }
    return toks;
}

}  // namespace

QuboModel import_qubo(std::string_view text) {
    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start <= text.size();) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }

    std::size_t header_line = 0;
    while (header_line < lines.size() && split_ws(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw ParseError("qubo text is empty");

    const auto header = split_ws(lines[header_line]);
    std::size_t n = 0;
    double offset = 0.0;
    if (header.size() != 4 || header[0] != "#" || header[1] != "qubo" ||
        !header[2].starts_with("n=") || !header[3].starts_with("offset=") ||
        !parse_number(header[2].substr(2), n) || !parse_number(header[3].substr(7), offset) ||
        !std::isfinite(offset))
        fail_at(header_line + 1, "expected header '# qubo n=<n> offset=<offset>'");

    std::vector<double> linear(n, 0.0);
    std::map<PairKey, double> quadratic;
    std::set<PairKey> seen;
    for (std::size_t k = header_line + 1; k < lines.size(); ++k) {
        const auto toks = split_ws(lines[k]);
        if (toks.empty()) continue;
        const std::size_t lineno = k + 1;
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (toks.size() != 3 || !parse_number(toks[0], i) || !parse_number(toks[1], j) ||
            !parse_number(toks[2], v))
            fail_at(lineno, "malformed entry, expected '<i> <j> <value>'");
        if (!std::isfinite(v)) fail_at(lineno, "coefficient is not finite");
        if (i > j) fail_at(lineno, "indices not ascending");
        if (j >= n) fail_at(lineno, "index out of range");
        if (!seen.insert({i, j}).second) fail_at(lineno, "duplicate coefficient entry");
        if (i == j)
            linear[i] = v;
        else if (v != 0.0)
            quadratic.emplace(PairKey{i, j}, v);
    }
    return QuboModel(std::move(linear), std::move(quadratic), offset);
}

}  // namespace tcm
