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

#include "tcm/llm.hpp"

#include <algorithm>
#include <cstdio>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "tcm/bench.hpp"
#include "tcm/ingest.hpp"

namespace tcm {

using nlohmann::json;

std::uint64_t estimate_tokens(std::string_view text) {
    return (static_cast<std::uint64_t>(text.size()) + 3) / 4;
}

// --- transports -------------------------------------------------------------

MockClient::MockClient(std::vector<std::string> responses) : responses_(std::move(responses)) {}

MockClient MockClient::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw Error("mock fixture directory '" + dir.string() + "' does not exist");
    std::vector<std::string> responses;
    for (std::size_t i = 0;; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "%03zu.txt", i);
        std::ifstream in(dir / name, std::ios::binary);
        if (!in) break;
        std::ostringstream buf;
        buf << in.rdbuf();
        responses.push_back(buf.str());
    }
    if (responses.empty()) throw Error("mock fixture directory '" + dir.string() + "' has no 000.txt");
    return MockClient(std::move(responses));
}

Completion MockClient::complete(const std::string& prompt) {
    if (next_ >= responses_.size()) {
        char name[16];
        std::snprintf(name, sizeof(name), "%03zu.txt", next_);
        throw Error(std::string("mock client has no response for request ") + name);
    }
    prompts_.push_back(prompt);
    return Completion{responses_[next_++], std::nullopt, std::nullopt};
}

LiveConfig LiveConfig::from_env() {
    auto get = [](const char* name) -> std::string {
        const char* v = std::getenv(name);
        return v ? v : "";
    };
    LiveConfig c;
    c.endpoint = get("TCM_LLM_ENDPOINT");
    c.model = get("TCM_LLM_MODEL");
    c.api_key = get("TCM_LLM_API_KEY");
    if (c.endpoint.empty()) throw Error("TCM_LLM_ENDPOINT is not set");
    if (c.model.empty()) throw Error("TCM_LLM_MODEL is not set");
    return c;
}

LiveClient::LiveClient(LiveConfig config) : config_(std::move(config)) {}

Completion LiveClient::complete(const std::string& prompt) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.endpoint, m, url_re))
        throw Error("endpoint '" + config_.endpoint + "' is not an http(s) URL");
    const std::string path = m[2].matched ? m[2].str() : "/";

    httplib::Client http(m[1].str());
    http.set_connection_timeout(config_.timeout);
    http.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    const json body{{"model", config_.model},
                    {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
    auto res = http.Post(path, headers, body.dump(), "application/json");
    if (!res) throw Error("completion request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error("completion endpoint returned HTTP " + std::to_string(res->status) + ": " +
                    res->body.substr(0, 200));

    const json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw Error("completion endpoint returned invalid JSON");
    Completion out;
    try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw Error("completion reply has no choices[0].message.content");
    }
    if (auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
        if (usage->contains("prompt_tokens") && (*usage)["prompt_tokens"].is_number_unsigned())
            out.prompt_tokens = (*usage)["prompt_tokens"].get<std::uint64_t>();
        if (usage->contains("completion_tokens") && (*usage)["completion_tokens"].is_number_unsigned())
            out.completion_tokens = (*usage)["completion_tokens"].get<std::uint64_t>();
    }
    return out;
}

// --- prompts and transcripts ------------------------------------------------

std::string render_prompt(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        const std::string key(tmpl.substr(open + 2, close - open - 2));
        auto it = values.find(key);
        if (it == values.end()) throw Error("prompt placeholder '" + key + "' has no value");
        out += it->second;
        pos = close + 2;
    }
    out.append(tmpl.substr(pos));
    return out;
}

json to_json(const Transcript& t) {
    json j{{"prompt", t.prompt},
           {"response", t.response},
           {"prompt_tokens", t.prompt_tokens},
           {"response_tokens", t.response_tokens}};
    if (t.provider_prompt_tokens) j["provider_prompt_tokens"] = *t.provider_prompt_tokens;
    if (t.provider_response_tokens) j["provider_response_tokens"] = *t.provider_response_tokens;
    return j;
}

PipelineError::PipelineError(std::string stage, const std::string& message,
                             std::vector<Transcript> transcripts, bool incomplete_coverage)
    : Error("pipeline stage '" + stage + "': " + message),
      stage_(std::move(stage)),
      transcripts_(std::move(transcripts)),
      incomplete_coverage_(incomplete_coverage) {}

namespace {

Transcript round_trip(CompletionClient& client, const std::string& prompt) {
    Completion c = client.complete(prompt);
    Transcript t;
    t.prompt = prompt;
    t.prompt_tokens = estimate_tokens(prompt);
    t.response = std::move(c.text);
    t.response_tokens = estimate_tokens(t.response);
    t.provider_prompt_tokens = c.prompt_tokens;
    t.provider_response_tokens = c.completion_tokens;
    return t;
}

}  // namespace

// --- stages -----------------------------------------------------------------

GenerationResult generate_comprehensive_suite(const std::string& code, CompletionClient& client) {
    if (code.empty()) throw PipelineError("generate", "code under test is empty", {});

    GenerationResult result;
    std::string prompt = render_prompt(prompts::kGenerate, {{"code", code}});
    std::string first_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            result.transcripts.push_back(round_trip(client, prompt));
        } catch (const Error& e) {
            throw PipelineError("generate", e.what(), result.transcripts);
        }
        try {
            result.suite = parse_model_output(result.transcripts.back().response);
            return result;
        } catch (const Error& e) {
            if (attempt == 1)
                throw PipelineError("generate",
                                    "no usable suite after 2 attempts (first: " + first_error +
                                        "; second: " + e.what() + ")",
                                    result.transcripts);
            first_error = e.what();
            prompt = render_prompt(prompts::kRepair, {{"error", e.what()},
                                                      {"previous", result.transcripts.back().response}});
        }
    }
    return result;  // unreachable
}

std::string extract_code_block(std::string_view text) {
    const auto open = text.find("```");
    if (open != std::string_view::npos) {
        const auto body_start = text.find('\n', open);
        if (body_start != std::string_view::npos) {
            const auto close = text.find("```", body_start + 1);
            if (close != std::string_view::npos) {
                auto body = text.substr(body_start + 1, close - body_start - 1);
                if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
                if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
                return std::string(body);
            }
        }
    }
    return std::string(text);
}

RefinementResult refine_code(const std::string& code, const TestSuite& minimized, CompletionClient& client) {
    const std::string prompt =
        render_prompt(prompts::kRefine, {{"code", code}, {"suite", emit_suite(minimized)}});
    RefinementResult out;
    try {
        out.transcript = round_trip(client, prompt);
    } catch (const Error& e) {
        throw PipelineError("refine", e.what(), {});
    }
    const bool blank = std::all_of(out.transcript.response.begin(), out.transcript.response.end(),
                                   [](unsigned char c) { return std::isspace(c); });
    if (blank) throw PipelineError("refine", "completion service returned an empty response", {out.transcript});
    out.code = extract_code_block(out.transcript.response);
    return out;
}

std::string specification_text(std::string_view code, std::string_view suite_document) {
    std::string s(code);
    s.append(suite_document);
    return s;
}

PipelineReport run_pipeline(const std::string& code, const PipelineConfig& config, CompletionClient& client) {
    PipelineReport report;

    auto generated = generate_comprehensive_suite(code, client);
    report.transcripts = std::move(generated.transcripts);
    const TestSuite& full = generated.suite;

    TestSuite minimized;
    try {
        const auto matrix = build_coverage_matrix(full);
        const auto model = build_qubo(matrix, config.qubo);
        report.lambda = resolve_lambda(matrix, config.qubo);
        report.solver = to_string(config.solver);
        switch (config.solver) {
            case SolverKind::kExact: report.solve = exact_solve(model, config.exact_cap); break;
            case SolverKind::kAnneal: report.solve = simulated_annealing(model, config.anneal); break;
            case SolverKind::kGreedy: report.solve = greedy_cover(matrix, model); break;
        }
        report.minimized_ids = selected_ids(matrix, report.solve.assignment);
        report.coverage = check_coverage(matrix, report.minimized_ids);
        const auto uncoverable = uncoverable_features(matrix);
        for (const auto& f : report.coverage.uncovered)
            if (std::find(uncoverable.begin(), uncoverable.end(), f) == uncoverable.end())
                throw PipelineError("minimize", "solver left feature '" + f + "' uncovered",
                                    report.transcripts, true);
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError("minimize", e.what(), report.transcripts);
    }

    minimized.features = full.features;
    for (const auto& t : full.tests)
        if (std::find(report.minimized_ids.begin(), report.minimized_ids.end(), t.id) !=
            report.minimized_ids.end())
            minimized.tests.push_back(t);

    report.comprehensive_size = full.tests.size();
    report.minimized_size = minimized.tests.size();
    report.comprehensive_document = emit_suite(full);
    report.minimized_document = emit_suite(minimized);
    report.baseline_tokens = estimate_tokens(specification_text(code, report.comprehensive_document));
    report.guided_tokens = estimate_tokens(specification_text(code, report.minimized_document));
    report.token_reduction_pct = improvement_percent(static_cast<double>(report.baseline_tokens),
                                                     static_cast<double>(report.guided_tokens));

    if (config.refine) {
        try {
            auto refined = refine_code(code, minimized, client);
            report.transcripts.push_back(std::move(refined.transcript));
            report.refined_code = std::move(refined.code);
        } catch (const PipelineError& e) {
            auto all = report.transcripts;
            all.insert(all.end(), e.transcripts().begin(), e.transcripts().end());
            throw PipelineError("refine", e.what(), std::move(all));
        }
    }
    return report;
}

json to_json(const PipelineReport& report, bool with_timing) {
    json transcripts = json::array();
    for (const auto& t : report.transcripts) transcripts.push_back(to_json(t));
    json solver{{"name", report.solver},
                {"energy", report.solve.energy},
                {"lambda", report.lambda},
                {"sweeps_or_steps", report.solve.stats.sweeps_or_steps},
                {"restarts", report.solve.stats.restarts},
                {"seed", report.solve.stats.seed}};
    if (with_timing) solver["wall_time"] = report.solve.stats.wall_time;
    return json{{"schema_version", 1},
                {"baseline_tokens", report.baseline_tokens},
                {"guided_tokens", report.guided_tokens},
                {"token_reduction_pct", report.token_reduction_pct},
                {"comprehensive_size", report.comprehensive_size},
                {"minimized_size", report.minimized_size},
                {"minimized_ids", report.minimized_ids},
                {"refined_code", report.refined_code ? json(*report.refined_code) : json(nullptr)},
                {"coverage", to_json(report.coverage)},
                {"solver", solver},
                {"transcripts", transcripts}};
}

}  // namespace tcm
