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

#include "editmem/question_cache.h"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "editmem/error.h"
#include "editmem/mock_embedder.h"

namespace editmem {

using njson = nlohmann::json;

QuestionCache::QuestionCache(std::string path) : path_(std::move(path)) {
    load();
}

std::string
QuestionCache::make_key(CacheEntryKind kind, const std::string& fact, int n_h) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s:%016llx:%d:%d", kind == CacheEntryKind::kScored ? "scored" : "gen",
                  static_cast<unsigned long long>(fnv1a64(fact)), n_h, kPromptVersion);
    return buf;
}

std::optional<CachedQuestions>
QuestionCache::get(CacheEntryKind kind, const std::string& fact, int n_h) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(make_key(kind, fact, n_h));
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool
QuestionCache::put(CacheEntryKind kind, const std::string& fact, int n_h, const CachedQuestions& entry) {
    const std::string key = make_key(kind, fact, n_h);
    std::lock_guard lock(mu_);
    if (!entries_.emplace(key, entry).second) {
        return false;
    }
    if (!path_.empty()) {
        njson j{{"key", key},
                {"kind", kind == CacheEntryKind::kScored ? "scored" : "generated"},
                {"fact", fact},
                {"n_h", n_h},
                {"prompt_version", kPromptVersion},
                {"questions", entry.questions}};
        if (kind == CacheEntryKind::kScored) {
            j["embeddings"] = entry.embeddings;
            j["relevance"] = entry.relevance;
            j["redundancy"] = entry.redundancy;
            j["quality"] = entry.quality ? njson(*entry.quality) : njson(nullptr);
        }
        std::ofstream out(path_, std::ios::app);
        if (!out) {
            throw_error(ErrorKind::kData, "cannot append to question cache '" + path_ + "'");
        }
        out << j.dump() << '\n';
    }
    return true;
}

size_t
QuestionCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

void
QuestionCache::load() {
    std::ifstream in(path_);
    if (!in) {
        return;  // created on first put
    }
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto j = njson::parse(line);
            if (j.at("prompt_version").get<int>() != kPromptVersion) {
                continue;
            }
            CachedQuestions e;
            e.questions = j.at("questions").get<std::vector<std::string>>();
            if (j.contains("embeddings")) {
                e.embeddings = j.at("embeddings").get<std::vector<Vector>>();
                e.relevance = j.at("relevance").get<double>();
                e.redundancy = j.at("redundancy").get<double>();
                if (!j.at("quality").is_null()) {
                    e.quality = j.at("quality").get<double>();
                }
            }
            entries_.emplace(j.at("key").get<std::string>(), std::move(e));
        } catch (const njson::exception& ex) {
            throw_error(ErrorKind::kData,
                        "question cache '" + path_ + "' line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
}

}  // namespace editmem
