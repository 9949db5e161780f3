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

#include "tcm/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tcm/error.hpp"

namespace tcm {

using nlohmann::json;

namespace {

std::string location_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json* member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json* v = member(obj, key);
    if (!v) throw ParseError(where + ": missing '" + key + "'");
    if (!v->is_string()) throw ParseError(where + ": '" + key + "' must be a string");
    return v->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
    const json* v = member(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ParseError(where + ": '" + key + "' must be a string");
    return v->get<std::string>();
}

TestSuite suite_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("suite document must be an object");

    if (const json* version = member(doc, "schema_version")) {
        if (!version->is_number_integer() || version->get<long long>() != kSuiteSchemaVersion)
            throw ParseError("unsupported schema_version " + version->dump() + " (expected " +
                             std::to_string(kSuiteSchemaVersion) + ")");
    }

    TestSuite suite;
    std::unordered_set<std::string> known;
    if (const json* features = member(doc, "features")) {
        if (!features->is_array()) throw ParseError("'features' must be a list");
        for (std::size_t k = 0; k < features->size(); ++k) {
            const json& f = (*features)[k];
            const std::string where = "features[" + std::to_string(k) + "]";
            if (!f.is_object()) throw ParseError(where + ": expected an object");
            Feature feature{require_string(f, "id", where), optional_string(f, "description", where)};
            if (!known.insert(feature.id).second)
                throw ValidationError("duplicate feature id '" + feature.id + "'");
            suite.features.push_back(std::move(feature));
        }
    }

    const json* tests = member(doc, "tests");
    if (!tests) throw ParseError("suite document has no 'tests' list");
    if (!tests->is_array()) throw ParseError("'tests' must be a list");
    for (std::size_t k = 0; k < tests->size(); ++k) {
        const json& t = (*tests)[k];
        const std::string where = "tests[" + std::to_string(k) + "]";
        if (!t.is_object()) throw ParseError(where + ": expected an object");

        TestCase tc;
        tc.id = require_string(t, "id", where);
        const std::string named = where + " ('" + tc.id + "')";
        tc.name = optional_string(t, "name", named).value_or(tc.id);
        if (const json* cost = member(t, "cost")) {
            if (!cost->is_number()) throw ParseError(named + ": 'cost' must be a number");
            tc.cost = cost->get<double>();
            if (!(tc.cost >= 0.0) || !std::isfinite(tc.cost))
                throw ValidationError("test '" + tc.id + "' has negative cost");
        }
        const json* covers = member(t, "covers");
        if (!covers || !covers->is_array()) throw ParseError(named + ": 'covers' must be a list");
        if (covers->empty()) throw ValidationError("test '" + tc.id + "' has an empty covers list");
        for (const auto& f : *covers) {
            if (!f.is_string()) throw ParseError(named + ": feature ids must be strings");
            auto id = f.get<std::string>();
            if (known.insert(id).second) suite.features.push_back(Feature{id, std::nullopt});
            tc.covers.push_back(std::move(id));
        }
        tc.body = optional_string(t, "body", named);
        suite.tests.push_back(std::move(tc));
    }

    suite.validate();
    return suite;
}

// Index one past the brace matching the '{' at `open`, honouring strings.
std::optional<std::size_t> matching_brace(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

}  // namespace

TestSuite parse_suite(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed suite document at " + location_of(text, e.byte == 0 ? 0 : e.byte - 1) +
                         ": " + e.what());
    }
    return suite_from_json(doc);
}

TestSuite parse_model_output(std::string_view text) {
    for (std::size_t open = text.find('{'); open != std::string_view::npos;
         open = text.find('{', open + 1)) {
        const auto close = matching_brace(text, open);
        if (!close) continue;
        const auto candidate = text.substr(open, *close - open);
        json doc = json::parse(candidate, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("tests")) continue;
        return suite_from_json(doc);
    }
    throw ParseError("no suite document found in model output: \"" +
                     std::string(text.substr(0, 200)) + "\"");
}

std::string emit_suite(const TestSuite& suite) {
    json tests = json::array();
    for (const auto& t : suite.tests) {
        json obj{{"id", t.id}, {"name", t.name}, {"cost", t.cost}, {"covers", t.covers}};
        if (t.body) obj["body"] = *t.body;
        tests.push_back(std::move(obj));
    }
    json features = json::array();
    for (const auto& f : suite.features) {
        json obj{{"id", f.id}};
        if (f.description) obj["description"] = *f.description;
        features.push_back(std::move(obj));
    }
    json doc{{"schema_version", kSuiteSchemaVersion}, {"tests", tests}, {"features", features}};
    return doc.dump(2) + "\n";
}

}  // namespace tcm
