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

#include <stdexcept>
#include <string>

namespace tcm {

// Base for every error raised by the library. Callers that only care about
// "did it work" catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a data-model invariant (duplicate id, dangling reference...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Text could not be read as the expected format.
class ParseError : public Error {
public:
    using Error::Error;
};

// A solver refused the problem (size cap, bad parameters, uncoverable rows).
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace tcm
