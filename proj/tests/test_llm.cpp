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

#include <fstream>
#include <sstream>
#include <thread>

#include <catch2/catch_amalgamated.hpp>
#include <httplib.h>

#include "support.hpp"
#include "tcm/bench.hpp"
#include "tcm/ingest.hpp"
#include "tcm/llm.hpp"

using namespace tcm;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kCode = "def add(a, b):\n    return a + b\n";

}  // namespace

TEST_CASE("estimate_tokens", "[llm]") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens("abcd") == 1);
    CHECK(estimate_tokens("abcde") == 2);
    CHECK(estimate_tokens("0123456789") == 3);
}

TEST_CASE("render_prompt", "[llm]") {
    CHECK(render_prompt("a {{x}} b {{y}}", {{"x", "1"}, {"y", "{{x}}"}}) == "a 1 b {{x}}");
    CHECK_THROWS_AS(render_prompt("{{missing}}", {}), Error);
    CHECK(render_prompt(prompts::kGenerate, {{"code", kCode}}).find(kCode) != std::string::npos);
}

TEST_CASE("mock client replays fixtures in order", "[llm]") {
    MockClient client({"zero", "one"});
    CHECK(client.complete("p0").text == "zero");
    CHECK(client.complete("p1").text == "one");
    CHECK_THROWS_WITH(client.complete("p2"), ContainsSubstring("002.txt"));
    CHECK(client.prompts() == std::vector<std::string>{"p0", "p1"});

    auto from_dir = MockClient::from_directory(tcm::testing::fixture("pipeline/retry"));
    CHECK(from_dir.complete("x").text.starts_with("Sure!"));
    CHECK_THROWS_AS(MockClient::from_directory(tcm::testing::fixture("does-not-exist")), Error);
}

TEST_CASE("generate_comprehensive_suite", "[llm]") {
    const auto inst_a_reply = slurp(tcm::testing::fixture("pipeline/inst_a/000.txt"));

    SECTION("first reply parses") {
        MockClient client({inst_a_reply});
        const auto r = generate_comprehensive_suite(kCode, client);
        CHECK(r.suite.tests.size() == 5);
        CHECK(r.suite.features.size() == 3);
        CHECK(r.transcripts.size() == 1);
        CHECK(r.transcripts[0].prompt.find(kCode) != std::string::npos);
        CHECK(r.transcripts[0].response_tokens == estimate_tokens(inst_a_reply));
    }
    SECTION("garbage then a document") {
        MockClient client({"I cannot help with that.", inst_a_reply});
        const auto r = generate_comprehensive_suite(kCode, client);
        CHECK(r.suite.tests.size() == 5);
        REQUIRE(r.transcripts.size() == 2);
        CHECK(r.transcripts[1].prompt.find("I cannot help with that.") != std::string::npos);
        CHECK(r.transcripts[1].prompt.find("no suite document") != std::string::npos);
    }
    SECTION("garbage twice") {
        MockClient client({"nope", "still nope"});
        try {
            generate_comprehensive_suite(kCode, client);
            FAIL("expected a pipeline error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == "generate");
            CHECK(e.transcripts().size() == 2);
            CHECK(e.transcripts()[1].response == "still nope");
        }
    }
    SECTION("empty code") {
        MockClient client({inst_a_reply});
        CHECK_THROWS_AS(generate_comprehensive_suite("", client), PipelineError);
        CHECK(client.calls() == 0);
    }
}

TEST_CASE("refine_code extraction", "[llm]") {
    const auto suite = tcm::testing::inst_a();
    SECTION("fenced block") {
        MockClient client({"Refactored:\n```python\ndef f():\n    return 1\n```\nDone."});
        const auto r = refine_code(kCode, suite, client);
        CHECK(r.code == "def f():\n    return 1");
        CHECK(client.prompts()[0].find(emit_suite(suite)) != std::string::npos);
        CHECK(client.prompts()[0].find(kCode) != std::string::npos);
    }
    SECTION("unfenced") {
        MockClient client({"def f(): return 1"});
        CHECK(refine_code(kCode, suite, client).code == "def f(): return 1");
    }
    SECTION("empty") {
        MockClient client({""});
        CHECK_THROWS_AS(refine_code(kCode, suite, client), PipelineError);
    }
}

TEST_CASE("run_pipeline on INST-A fixtures", "[llm]") {
    const auto code = slurp(tcm::testing::fixture("pipeline/inventory.py"));
    PipelineConfig config;
    config.anneal.seed = 42;
    auto client = MockClient::from_directory(tcm::testing::fixture("pipeline/inst_a"));
    const auto report = run_pipeline(code, config, client);

    CHECK(report.comprehensive_size == 5);
    CHECK(report.minimized_size == 2);
    CHECK(report.minimized_ids.size() == 2);
    CHECK(report.coverage.uncovered.empty());
    CHECK(report.baseline_tokens == estimate_tokens(code + report.comprehensive_document));
    CHECK(report.guided_tokens == estimate_tokens(code + report.minimized_document));
    CHECK(report.token_reduction_pct ==
          improvement_percent(static_cast<double>(report.baseline_tokens), static_cast<double>(report.guided_tokens)));
    CHECK(report.token_reduction_pct > 0.0);
    CHECK_FALSE(report.refined_code.has_value());

    // The minimized document re-parses to exactly the selected tests.
    const auto minimized = parse_suite(report.minimized_document);
    REQUIRE(minimized.tests.size() == 2);
    CHECK(minimized.tests[0].id == report.minimized_ids[0]);
    CHECK(minimized.features.size() == 3);

    // Deterministic under the mock.
    auto again = MockClient::from_directory(tcm::testing::fixture("pipeline/inst_a"));
    CHECK(to_json(run_pipeline(code, config, again), false) == to_json(report, false));
}

TEST_CASE("run_pipeline with no redundancy keeps every test", "[llm]") {
    PipelineConfig config;
    config.solver = SolverKind::kExact;
    auto client = MockClient::from_directory(tcm::testing::fixture("pipeline/distinct"));
    const auto report = run_pipeline(kCode, config, client);
    CHECK(report.minimized_size == report.comprehensive_size);
    CHECK(report.minimized_size == 3);
    // Only the surrounding document (prose and fences) differed from the reply.
    CHECK(report.comprehensive_document == report.minimized_document);
    CHECK(report.token_reduction_pct == 0.0);
}

TEST_CASE("run_pipeline stage errors", "[llm]") {
    PipelineConfig config;
    SECTION("empty suite fails at minimize") {
        MockClient client({R"({"schema_version": 1, "tests": []})"});
        try {
            run_pipeline(kCode, config, client);
            FAIL("expected a pipeline error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == "minimize");
            CHECK(std::string(e.what()).find("no tests") != std::string::npos);
            CHECK(e.transcripts().size() == 1);
            CHECK_FALSE(e.incomplete_coverage());
        }
    }
    SECTION("refine failure carries every transcript") {
        auto reply = slurp(tcm::testing::fixture("pipeline/inst_a/000.txt"));
        MockClient client({reply, "   "});
        config.refine = true;
        try {
            run_pipeline(kCode, config, client);
            FAIL("expected a pipeline error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == "refine");
            CHECK(e.transcripts().size() == 2);
        }
    }
}

TEST_CASE("run_pipeline with refinement", "[llm]") {
    PipelineConfig config;
    config.refine = true;
    auto client = MockClient::from_directory(tcm::testing::fixture("pipeline/refine"));
    const auto report = run_pipeline(slurp(tcm::testing::fixture("pipeline/inventory.py")), config, client);
    REQUIRE(report.refined_code.has_value());
    CHECK(report.refined_code->starts_with("class Inventory:"));
    CHECK(report.transcripts.size() == 2);
    CHECK(report.transcripts[1].prompt.find(report.minimized_document) != std::string::npos);
}

TEST_CASE("live client speaks the chat-completions wire format", "[llm]") {
    httplib::Server server;
    std::string seen_auth;
    nlohmann::json seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = nlohmann::json::parse(req.body);
        const nlohmann::json reply{
            {"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}},
            {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 2}}}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    LiveClient client({base + "/v1/chat/completions", "test-model", "secret", std::chrono::seconds(5)});
    const auto c = client.complete("ping");
    CHECK(c.text == "pong");
    CHECK(c.prompt_tokens == std::optional<std::uint64_t>(11));
    CHECK(c.completion_tokens == std::optional<std::uint64_t>(2));
    CHECK(seen_auth == "Bearer secret");
    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["messages"][0]["role"] == "user");
    CHECK(seen_body["messages"][0]["content"] == "ping");

    LiveClient broken({base + "/broken", "m", "", std::chrono::seconds(5)});
    CHECK_THROWS_WITH(broken.complete("x"), ContainsSubstring("500"));
    LiveClient bad_url({"ftp://nowhere", "m", "", std::chrono::seconds(1)});
    CHECK_THROWS_AS(bad_url.complete("x"), Error);

    server.stop();
    worker.join();
}

TEST_CASE("transcript documents carry provider counts only when present", "[llm]") {
    Transcript t{"p", "r", 1, 1, std::nullopt, 7};
    const auto j = to_json(t);
    CHECK_FALSE(j.contains("provider_prompt_tokens"));
    CHECK(j["provider_response_tokens"] == 7);
}
