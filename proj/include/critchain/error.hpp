/*
   Copyright 2026 The critchain Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace critchain {

/// Error categories raised by the engine. The numeric values are mirrored by
/// the C API status codes.
enum class ErrorCode {
    invalid_attribute = 1,
    domain = 2,
    singular_chain = 3,
    singular_mediator = 4,
    inertia_order = 5,
    kernel = 6,
    no_forwarding = 7,
    degenerate_forwarding = 8,
    empty_stage = 9,
    numeric = 10,
    kernel_stall = 11,
    budget = 12,
    search_space = 13,
    schema = 14,
    io = 15,
};

const char* error_code_name(ErrorCode code) noexcept;

/// True for failures of the numerics (singular chains, stalled kernels,
/// non-convergent solves) as opposed to invalid input.
bool is_numeric_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace critchain
