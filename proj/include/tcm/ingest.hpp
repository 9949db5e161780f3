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

#include <string>
#include <string_view>

#include "tcm/model.hpp"

namespace tcm {

inline constexpr int kSuiteSchemaVersion = 1;

// Reads a suite document. Missing costs default to 1.0, a missing name
// defaults to the id, and features referenced by tests but not declared are
// registered in first-reference order after the declared ones.
TestSuite parse_suite(std::string_view text);

// Finds the first suite document embedded in free-form model output (prose,
// markdown fences) and parses it.
TestSuite parse_model_output(std::string_view text);

// Deterministic, key-sorted, two-space-indented document.
std::string emit_suite(const TestSuite& suite);

}  // namespace tcm
