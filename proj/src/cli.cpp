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

#include "tcm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tcm/bench.hpp"
#include "tcm/error.hpp"
#include "tcm/ingest.hpp"
#include "tcm/llm.hpp"
#include "tcm/qubo.hpp"
#include "tcm/solvers.hpp"
#include "tcm/verify.hpp"

namespace tcm {

using nlohmann::json;

namespace {

struct GlobalFlags {
    std::uint64_t seed = 0;
    std::optional<double> lambda;
    double lambda_multiplier = 2.0;
    std::string solver = "sa";
    std::uint64_t sweeps = AnnealParams{}.sweeps;
    std::uint64_t restarts = AnnealParams{}.restarts;
    std::string output;
    std::string format = "document";
    bool no_timing = false;

    QuboConfig qubo() const {
        QuboConfig c;
        if (lambda)
            c.lambda = ExplicitLambda{*lambda};
        else
            c.lambda = AutoLambda{lambda_multiplier};
        return c;
    }

    AnnealParams anneal() const {
        AnnealParams p;
        p.sweeps = sweeps;
        p.restarts = restarts;
        p.seed = seed;
        return p;
    }
};

// Raised for I/O failures so they map to the input-error exit code.
class IoError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write '" + path.string() + "'");
}

class Emitter {
public:
    Emitter(const GlobalFlags& flags, std::ostream& out) : flags_(flags), out_(out) {}

    void emit(const std::string& text) const {
        if (flags_.output.empty())
            out_ << text;
        else
            write_file(flags_.output, text);
    }

private:
    const GlobalFlags& flags_;
    std::ostream& out_;
};

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& it : items) s += (s.empty() ? "" : ", ") + it;
    return s;
}

std::vector<std::string> coverable_gaps(const CoverageMatrix& matrix, const CoverageReport& report) {
    const auto uncoverable = uncoverable_features(matrix);
    std::vector<std::string> gaps;
    for (const auto& f : report.uncovered)
        if (std::find(uncoverable.begin(), uncoverable.end(), f) == uncoverable.end()) gaps.push_back(f);
    return gaps;
}

json solver_json(const std::string& name, const SolveStats& stats, bool with_timing) {
    json j{{"name", name},
           {"sweeps_or_steps", stats.sweeps_or_steps},
           {"restarts", stats.restarts},
           {"seed", stats.seed}};
    if (with_timing) j["wall_time"] = stats.wall_time;
    return j;
}

int cmd_minimize(const GlobalFlags& flags, const std::string& suite_path, std::ostream& out, std::ostream& err) {
    const auto suite = parse_suite(read_file(suite_path));
    const auto matrix = build_coverage_matrix(suite);
    const auto config = flags.qubo();
    const auto model = build_qubo(matrix, config);
    const double lambda = resolve_lambda(matrix, config);
    if (!model.skipped_features().empty())
        err << "warning: no test covers " << join(model.skipped_features()) << "; excluded from the model\n";

    const auto kind = parse_solver_kind(flags.solver);
    SolveResult result;
    switch (kind) {
        case SolverKind::kExact: result = exact_solve(model); break;
        case SolverKind::kAnneal: result = simulated_annealing(model, flags.anneal()); break;
        case SolverKind::kGreedy: result = greedy_cover(matrix, model); break;
    }
    const auto selection = selected_ids(matrix, result.assignment);
    const auto report = check_coverage(matrix, selection);
    const auto gaps = coverable_gaps(matrix, report);

    if (flags.format == "text") {
        std::ostringstream s;
        s << "selected " << selection.size() << " of " << matrix.num_tests() << " tests: " << join(selection) << "\n"
          << "energy " << format_real(result.energy) << ", total cost " << format_real(report.total_cost)
          << ", lambda " << format_real(lambda) << "\n"
          << "covered " << report.covered.size() << " of " << matrix.num_features() << " features\n";
        if (!gaps.empty()) s << "UNCOVERED: " << join(gaps) << "\n";
        Emitter(flags, out).emit(s.str());
    } else {
        json doc{{"schema_version", 1},
                 {"selected", selection},
                 {"energy", result.energy},
                 {"total_cost", report.total_cost},
                 {"lambda", lambda},
                 {"coverage", to_json(report)},
                 {"uncoverable", uncoverable_features(matrix)},
                 {"solver", solver_json(to_string(kind), result.stats, !flags.no_timing)}};
        Emitter(flags, out).emit(doc.dump(2) + "\n");
    }
    if (!gaps.empty()) {
        err << "error: selection leaves coverable features uncovered: " << join(gaps) << "\n";
        return kExitIncompleteCoverage;
    }
    return kExitOk;
}

std::vector<std::string> read_selection(const std::string& path) {
    const std::string text = read_file(path);
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("selection file '" + path + "' is not valid JSON");
    const json* list = &doc;
    if (doc.is_object()) {
        auto it = doc.find("selected");
        if (it == doc.end()) throw ParseError("selection document has no 'selected' list");
        list = &*it;
    }
    if (!list->is_array()) throw ParseError("'selected' must be a list of test ids");
    std::vector<std::string> ids;
    for (const auto& v : *list) {
        if (!v.is_string()) throw ParseError("selection entries must be test id strings");
        ids.push_back(v.get<std::string>());
    }
    return ids;
}

int cmd_verify(const GlobalFlags& flags, const std::string& suite_path, const std::string& selection_path,
               std::ostream& out, std::ostream& err) {
    const auto matrix = build_coverage_matrix(parse_suite(read_file(suite_path)));
    const auto report = check_coverage(matrix, read_selection(selection_path));
    const auto gaps = coverable_gaps(matrix, report);

    if (flags.format == "text") {
        std::ostringstream s;
        s << "covered:   " << join(report.covered) << "\n"
          << "uncovered: " << join(report.uncovered) << "\n"
          << "removable: " << join(report.removable) << "\n"
          << "total cost " << format_real(report.total_cost) << "\n";
        Emitter(flags, out).emit(s.str());
    } else {
        json doc = to_json(report);
        doc["uncoverable"] = uncoverable_features(matrix);
        doc["complete"] = gaps.empty();
        Emitter(flags, out).emit(doc.dump(2) + "\n");
    }
    if (!gaps.empty()) {
        err << "error: uncovered features: " << join(gaps) << "\n";
        return kExitIncompleteCoverage;
    }
    return kExitOk;
}

int cmd_export_qubo(const GlobalFlags& flags, const std::string& suite_path, std::ostream& out, std::ostream& err) {
    const auto matrix = build_coverage_matrix(parse_suite(read_file(suite_path)));
    const auto model = build_qubo(matrix, flags.qubo());
    if (!model.skipped_features().empty())
        err << "warning: no test covers " << join(model.skipped_features()) << "; excluded from the model\n";
    Emitter(flags, out).emit(export_qubo(model));
    return kExitOk;
}

CostModel parse_cost_model(const std::string& text) {
    if (text == "unit") return CostModel::unit();
    double lo = 0.0, hi = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "uniform:%lf:%lf%c", &lo, &hi, &tail) == 2) return CostModel::uniform(lo, hi);
    throw ValidationError("cost model must be 'unit' or 'uniform:<lo>:<hi>', got '" + text + "'");
}

struct InstanceFlags {
    std::vector<std::size_t> n{12};
    std::vector<std::size_t> m{6};
    double redundancy = 2.0;
    bool single_label = false;
    std::string cost_model = "unit";
    std::size_t instances = 1;

    std::vector<InstanceSpec> specs(std::uint64_t seed) const {
        if (n.size() != m.size()) throw ValidationError("--n and --m must be given the same number of times");
        std::vector<InstanceSpec> out;
        for (std::size_t k = 0; k < n.size(); ++k)
            for (std::size_t s = 0; s < instances; ++s) {
                InstanceSpec spec;
                spec.n_tests = n[k];
                spec.m_features = m[k];
                spec.redundancy = redundancy;
                spec.single_label = single_label;
                spec.cost_model = parse_cost_model(cost_model);
                spec.seed = seed + s;
                out.push_back(spec);
            }
        return out;
    }
};

void add_instance_options(CLI::App* cmd, InstanceFlags& f) {
    cmd->add_option("--n", f.n, "Number of tests (repeatable, paired with --m)");
    cmd->add_option("--m", f.m, "Number of features (repeatable, paired with --n)");
    cmd->add_option("--redundancy", f.redundancy, "Average covering tests per feature");
    cmd->add_flag("--single-label", f.single_label, "Give every test exactly one feature");
    cmd->add_option("--cost-model", f.cost_model, "unit or uniform:<lo>:<hi>");
}

int cmd_gen_instance(const GlobalFlags& flags, const InstanceFlags& inst, std::ostream& out) {
    const auto specs = inst.specs(flags.seed);
    if (specs.size() != 1) throw ValidationError("gen-instance writes a single instance; pass one --n/--m pair");
    Emitter(flags, out).emit(emit_suite(gen_instance(specs.front())));
    return kExitOk;
}

int cmd_bench(const GlobalFlags& flags, const InstanceFlags& inst, const std::vector<std::string>& solver_names,
              std::size_t repetitions, bool parallel, std::ostream& out) {
    std::vector<SolverKind> solvers;
    for (const auto& s : solver_names) solvers.push_back(parse_solver_kind(s));
    BenchOptions options;
    options.repetitions = repetitions;
    options.anneal = flags.anneal();
    options.lambda_multiplier = flags.lambda_multiplier;
    options.parallel_instances = parallel;
    if (flags.lambda) throw ValidationError("bench always uses automatic lambda; use --lambda-multiplier");

    const auto rows = run_benchmark(inst.specs(flags.seed), solvers, options);
    if (flags.format == "text") {
        std::ostringstream s;
        char line[256];
        std::snprintf(line, sizeof(line), "%-32s %-7s %4s %4s %12s %14s %s\n", "instance", "solver", "n", "m",
                      "median_ms", "best_energy", "optimum");
        s << line;
        for (const auto& r : rows) {
            std::snprintf(line, sizeof(line), "%-32s %-7s %4zu %4zu %12.3f %14s %s\n", r.instance.c_str(),
                          r.solver.c_str(), r.n, r.m, flags.no_timing ? 0.0 : r.median_wall_time * 1e3,
                          format_real(r.best_energy).c_str(),
                          r.optimum_found ? (*r.optimum_found ? "yes" : "NO") : "-");
            s << line;
        }
        Emitter(flags, out).emit(s.str());
    } else {
        Emitter(flags, out).emit(bench_csv(rows, !flags.no_timing));
    }
    return kExitOk;
}

struct PipelineFlags {
    std::string code_path;
    std::string mock_dir;
    bool live = false;
    bool refine = false;
    std::string emit_dir;
};

int cmd_pipeline(const GlobalFlags& flags, const PipelineFlags& p, std::ostream& out, std::ostream& err) {
    const std::string code = read_file(p.code_path);
    std::unique_ptr<CompletionClient> client;
    if (p.live)
        client = std::make_unique<LiveClient>(LiveConfig::from_env());
    else
        client = std::make_unique<MockClient>(MockClient::from_directory(p.mock_dir));

    PipelineConfig config;
    config.solver = parse_solver_kind(flags.solver);
    config.qubo = flags.qubo();
    config.anneal = flags.anneal();
    config.refine = p.refine;

    PipelineReport report;
    try {
        report = run_pipeline(code, config, *client);
    } catch (const PipelineError& e) {
        err << "error: " << e.what() << "\n";
        for (std::size_t k = 0; k < e.transcripts().size(); ++k)
            err << "--- response " << k << " ---\n" << e.transcripts()[k].response.substr(0, 400) << "\n";
        return e.incomplete_coverage() ? kExitIncompleteCoverage : kExitInputError;
    }

    if (!p.emit_dir.empty()) {
        std::filesystem::create_directories(p.emit_dir);
        const std::filesystem::path dir(p.emit_dir);
        write_file(dir / "comprehensive.json", report.comprehensive_document);
        write_file(dir / "minimized.json", report.minimized_document);
        if (report.refined_code) write_file(dir / "refined_code.txt", *report.refined_code);
    }

    if (flags.format == "text") {
        std::ostringstream s;
        s << comparison_table({{"Total Tokens", static_cast<double>(report.baseline_tokens),
                                static_cast<double>(report.guided_tokens)},
                               {"Suite Size", static_cast<double>(report.comprehensive_size),
                                static_cast<double>(report.minimized_size)}});
        s << "minimized suite: " << join(report.minimized_ids) << "\n";
        Emitter(flags, out).emit(s.str());
    } else {
        Emitter(flags, out).emit(to_json(report, !flags.no_timing).dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Test-suite minimization through QUBO models", "tcmq"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--seed", flags.seed, "Random seed for annealing and instance generation");
    auto* lambda = app.add_option("--lambda", flags.lambda, "Explicit penalty weight")->check(CLI::PositiveNumber);
    auto* mult = app.add_option("--lambda-multiplier", flags.lambda_multiplier,
                                "Automatic lambda = max(multiplier * max cost, 1)");
    lambda->excludes(mult);
    mult->excludes(lambda);
    app.add_option("--solver", flags.solver, "sa, exact or greedy")
        ->check(CLI::IsMember({"sa", "exact", "greedy"}));
    app.add_option("--sweeps", flags.sweeps, "Annealing sweeps per restart");
    app.add_option("--restarts", flags.restarts, "Annealing restarts");
    app.add_option("--output,-o", flags.output, "Write the primary output to this file");
    app.add_option("--format", flags.format, "text or document")->check(CLI::IsMember({"text", "document"}));
    app.add_flag("--no-timing", flags.no_timing, "Omit wall-clock fields for reproducible output");

    std::string suite_path, selection_path;
    auto* minimize = app.add_subcommand("minimize", "Select a minimal covering subset of a suite");
    minimize->add_option("suite", suite_path, "Suite document")->required();

    auto* verify = app.add_subcommand("verify", "Check a selection against a suite");
    verify->add_option("suite", suite_path, "Suite document")->required();
    verify->add_option("selection", selection_path, "Selection document")->required();

    auto* export_cmd = app.add_subcommand("export-qubo", "Write the QUBO model of a suite as text");
    export_cmd->add_option("suite", suite_path, "Suite document")->required();

    InstanceFlags inst;
    auto* gen = app.add_subcommand("gen-instance", "Generate a synthetic labeled suite");
    add_instance_options(gen, inst);

    std::vector<std::string> solver_names{"exact", "sa", "greedy"};
    std::size_t repetitions = 3;
    bool parallel = false;
    auto* bench = app.add_subcommand("bench", "Time solvers on synthetic instances (CSV)");
    add_instance_options(bench, inst);
    bench->add_option("--instances", inst.instances, "Instances per size, seeded --seed, --seed+1, ...");
    bench->add_option("--solvers", solver_names, "Solvers to run")->delimiter(',');
    bench->add_option("--repetitions", repetitions, "Timed solves per (instance, solver)");
    bench->add_flag("--parallel", parallel, "Benchmark instances concurrently");

    PipelineFlags pipe;
    auto* pipeline = app.add_subcommand("pipeline", "Generate, minimize and optionally refine via a completion service");
    pipeline->add_option("code", pipe.code_path, "Source file of the code under test")->required();
    auto* mock = pipeline->add_option("--mock", pipe.mock_dir, "Fixture directory with 000.txt, 001.txt, ...");
    auto* live = pipeline->add_flag("--live", pipe.live, "Use TCM_LLM_ENDPOINT / TCM_LLM_MODEL / TCM_LLM_API_KEY");
    mock->excludes(live);
    live->excludes(mock);
    pipeline->add_flag("--refine", pipe.refine, "Run the code refinement stage");
    pipeline->add_option("--emit-dir", pipe.emit_dir, "Also write comprehensive.json and minimized.json here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (pipeline->parsed() && !pipe.live && pipe.mock_dir.empty())
            throw ValidationError("pipeline needs --mock <dir> or --live");
        if (minimize->parsed()) return cmd_minimize(flags, suite_path, out, err);
        if (verify->parsed()) return cmd_verify(flags, suite_path, selection_path, out, err);
        if (export_cmd->parsed()) return cmd_export_qubo(flags, suite_path, out, err);
        if (gen->parsed()) return cmd_gen_instance(flags, inst, out);
        if (bench->parsed()) return cmd_bench(flags, inst, solver_names, repetitions, parallel, out);
        if (pipeline->parsed()) return cmd_pipeline(flags, pipe, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace tcm
