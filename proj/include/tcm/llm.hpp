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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcm/error.hpp"
#include "tcm/model.hpp"
#include "tcm/qubo.hpp"
#include "tcm/solvers.hpp"
#include "tcm/verify.hpp"

namespace tcm {

// ceil(characters / 4).
std::uint64_t estimate_tokens(std::string_view text);

struct Completion {
    std::string text;
    // Counts reported by the provider, when the transport has them.
    std::optional<std::uint64_t> prompt_tokens;
    std::optional<std::uint64_t> completion_tokens;
};

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual Completion complete(const std::string& prompt) = 0;
};

// Replays canned responses in request order. Running past the end is an error.
class MockClient final : public CompletionClient {
public:
    explicit MockClient(std::vector<std::string> responses);

    // Loads 000.txt, 001.txt, ... until the first missing index.
    static MockClient from_directory(const std::filesystem::path& dir);

    Completion complete(const std::string& prompt) override;

    std::size_t calls() const { return next_; }
    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    std::vector<std::string> responses_;
    std::vector<std::string> prompts_;
    std::size_t next_ = 0;
};

struct LiveConfig {
    std::string endpoint;  // full URL of a chat-completions route
    std::string model;
    std::string api_key;
    std::chrono::seconds timeout{120};

    // Reads TCM_LLM_ENDPOINT, TCM_LLM_MODEL and TCM_LLM_API_KEY. Throws if the
    // endpoint or model is unset.
    static LiveConfig from_env();
};

// Chat-completions client: POSTs {"model", "messages":[{"role":"user",...}]}
// and reads choices[0].message.content plus the optional usage block.
class LiveClient final : public CompletionClient {
public:
    explicit LiveClient(LiveConfig config);
    Completion complete(const std::string& prompt) override;

private:
    LiveConfig config_;
};

struct Transcript {
    std::string prompt;
    std::string response;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t response_tokens = 0;
    std::optional<std::uint64_t> provider_prompt_tokens;
    std::optional<std::uint64_t> provider_response_tokens;
};

nlohmann::json to_json(const Transcript& t);

class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& message, std::vector<Transcript> transcripts,
                  bool incomplete_coverage = false);

    const std::string& stage() const { return stage_; }
    const std::vector<Transcript>& transcripts() const { return transcripts_; }
    // The solver ran but left coverable features uncovered.
    bool incomplete_coverage() const { return incomplete_coverage_; }

private:
    std::string stage_;
    std::vector<Transcript> transcripts_;
    bool incomplete_coverage_;
};

// Prompt templates shipped with the library. Placeholders look like
// {{name}}; `render_prompt` substitutes them in a single pass.
namespace prompts {
extern const std::string_view kGenerate;
extern const std::string_view kRepair;
extern const std::string_view kRefine;
inline constexpr std::string_view kVersion = "v1";
}  // namespace prompts

std::string render_prompt(std::string_view tmpl, const std::map<std::string, std::string>& values);

struct GenerationResult {
    TestSuite suite;
    std::vector<Transcript> transcripts;
};

// One generation request plus at most one repair request if the first reply
// does not contain a usable suite document.
GenerationResult generate_comprehensive_suite(const std::string& code, CompletionClient& client);

struct RefinementResult {
    std::string code;
    Transcript transcript;
};

// Returns the first fenced code block of the reply, or the whole reply.
RefinementResult refine_code(const std::string& code, const TestSuite& minimized, CompletionClient& client);

// Body of the first ``` fenced block, or the text itself when there is none.
std::string extract_code_block(std::string_view text);

struct PipelineConfig {
    SolverKind solver = SolverKind::kAnneal;
    QuboConfig qubo;
    AnnealParams anneal;
    std::size_t exact_cap = kDefaultExactCap;
    bool refine = false;
};

struct PipelineReport {
    std::uint64_t baseline_tokens = 0;
    std::uint64_t guided_tokens = 0;
    double token_reduction_pct = 0.0;
    std::size_t comprehensive_size = 0;
    std::size_t minimized_size = 0;
    std::vector<std::string> minimized_ids;
    std::optional<std::string> refined_code;
    std::vector<Transcript> transcripts;

    std::string comprehensive_document;
    std::string minimized_document;
    std::string solver;
    double lambda = 0.0;
    SolveResult solve;
    CoverageReport coverage;
};

// Text the token counts are measured over: the code followed directly by a
// suite document.
std::string specification_text(std::string_view code, std::string_view suite_document);

// Generate -> minimize -> (optionally) refine. Stage failures surface as
// PipelineError carrying the stage name and the transcripts so far.
PipelineReport run_pipeline(const std::string& code, const PipelineConfig& config, CompletionClient& client);

// Key-sorted report document. `with_timing` false drops wall-clock fields.
nlohmann::json to_json(const PipelineReport& report, bool with_timing = true);

}  // namespace tcm
