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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "editmem/vector_ops.h"

namespace editmem {

/// 64-bit FNV-1a.
uint64_t
fnv1a64(std::string_view bytes);

/// splitmix64 generator; one 64-bit state word.
class SplitMix64 {
 public:
    explicit SplitMix64(uint64_t state) : state_(state) {}

    uint64_t
    next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [-1, 1).
    double
    next_signed_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-52 - 1.0;
    }

 private:
    uint64_t state_;
};

/// Lowercased alphanumeric tokens (everything else separates).
std::vector<std::string>
lowercase_tokens(std::string_view text);

/// Deterministic offline stand-in for a sentence encoder: mean of per-token
/// pseudo-random vectors, L2 normalised. Token-free text maps to e_0.
Vector
mock_embed(std::string_view text, size_t dim, uint64_t seed);

/// Deterministic template questions built from a declarative fact.
std::vector<std::string>
mock_questions(std::string_view fact, int n);

}  // namespace editmem
