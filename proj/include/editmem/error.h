// Copyright 2026-present the editmem authors
//
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

namespace editmem {

enum class ErrorKind {
    kInvalidArgument,  // caller broke a precondition
    kData,             // malformed or inconsistent input data / files
    kProvider,         // embedding or generation backend failed
    kState,            // operation not valid in the memory's current state
};

class Error : public std::runtime_error {
 public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

 private:
    ErrorKind kind_;
};

[[noreturn]] inline void
throw_error(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

#define EDITMEM_REQUIRE(cond, kind, msg)              \
    do {                                              \
        if (!(cond)) {                                \
            ::editmem::throw_error((kind), (msg));    \
        }                                             \
    } while (0)

}  // namespace editmem
