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

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "editmem/vector_ops.h"

namespace editmem {

/// Bumped whenever the question prompt or templates change, invalidating old entries.
inline constexpr int kPromptVersion = 1;

enum class CacheEntryKind { kGenerated, kScored };

struct CachedQuestions {
    std::vector<std::string> questions;
    // Scored entries only.
    std::vector<Vector> embeddings;
    double relevance = 0.0;
    double redundancy = 0.0;
    std::optional<double> quality;

    bool operator==(const CachedQuestions&) const = default;
};

/// Write-once store of question sets keyed by (kind, fact hash, n_h, prompt
/// version). Optionally backed by a JSON-lines file that is loaded on
/// construction and appended to on every new entry. Thread safe.
class QuestionCache {
 public:
    QuestionCache() = default;
    explicit QuestionCache(std::string path);

    QuestionCache(const QuestionCache&) = delete;
    QuestionCache& operator=(const QuestionCache&) = delete;

    std::optional<CachedQuestions>
    get(CacheEntryKind kind, const std::string& fact, int n_h) const;

    /// Returns false, leaving the stored entry untouched, if the key exists.
    bool
    put(CacheEntryKind kind, const std::string& fact, int n_h, const CachedQuestions& entry);

    size_t
    size() const;

    static std::string
    make_key(CacheEntryKind kind, const std::string& fact, int n_h);

 private:
    void
    load();

    std::string path_;
    mutable std::mutex mu_;
    std::map<std::string, CachedQuestions> entries_;
};

}  // namespace editmem
