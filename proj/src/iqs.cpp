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

#include "editmem/iqs.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>
#include <string_view>

#include "editmem/error.h"
#include "editmem/mock_embedder.h"

namespace editmem {

namespace {

constexpr std::array<const char*, 30> kStopWords = {
    "the", "a",    "an",   "is",  "are",  "was",   "were", "be",  "of",    "in",
    "on",  "at",   "to",   "for", "by",   "with",  "from", "and", "or",    "it",
    "that", "this", "what", "which", "who", "where", "when", "how", "does", "do",
};

bool
is_stop_word(const std::string& w) {
    return std::any_of(kStopWords.begin(), kStopWords.end(), [&](const char* s) { return w == s; });
}

std::set<std::string>
content_tokens(const std::string& text) {
    std::set<std::string> out;
    for (auto& t : lowercase_tokens(text)) {
        if (!is_stop_word(t)) {
            out.insert(std::move(t));
        }
    }
    return out;
}

bool
has_entity_token(const std::string& question) {
    std::istringstream in(question);
    bool first = true;
    for (std::string tok; in >> tok; first = false) {
        // Leading punctuation such as quotes or parentheses is not part of the word.
        const auto start = std::find_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isalnum(c) != 0; });
        if (start == tok.end()) {
            continue;
        }
        if (std::any_of(start, tok.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
            return true;
        }
        if (!first && std::isupper(static_cast<unsigned char>(*start)) != 0) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::span<const char* const>
overlap_stop_words() {
    return kStopWords;
}

double
unigram_overlap(const std::string& edit_text, const std::string& question) {
    const auto q = content_tokens(question);
    if (q.empty()) {
        return 0.0;
    }
    const auto e = content_tokens(edit_text);
    const auto shared = std::count_if(q.begin(), q.end(), [&](const std::string& t) { return e.count(t) > 0; });
    return static_cast<double>(shared) / static_cast<double>(q.size());
}

FilterResult
filter_questions_nothrow(const std::string& edit_text, const std::vector<std::string>& candidates) {
    FilterResult r;
    for (size_t i = 0; i < candidates.size(); ++i) {
        const auto& q = candidates[i];
        uint32_t reasons = 0;
        if (static_cast<size_t>(whitespace_token_count(q)) < kMinQuestionTokens) {
            reasons |= kRejectTooShort;
        }
        if (!has_entity_token(q)) {
            reasons |= kRejectNoEntity;
        }
        if (unigram_overlap(edit_text, q) < kMinQuestionOverlap) {
            reasons |= kRejectLowOverlap;
        }
        if (reasons == 0) {
            r.accepted.push_back(q);
        } else {
            r.rejected.push_back({i, q, reasons});
        }
    }
    return r;
}

FilterResult
filter_questions(const std::string& edit_text, const std::vector<std::string>& candidates) {
    EDITMEM_REQUIRE(!candidates.empty(), ErrorKind::kInvalidArgument, "filter_questions: no candidates");
    auto r = filter_questions_nothrow(edit_text, candidates);
    if (r.accepted.empty()) {
        throw_error(ErrorKind::kData, "filter_questions: all " + std::to_string(candidates.size()) +
                                          " candidates rejected for \"" + edit_text + "\"");
    }
    return r;
}

double
relevance(std::span<const double> edit_embedding, std::span<const Vector> question_embeddings) {
    EDITMEM_REQUIRE(!question_embeddings.empty(), ErrorKind::kInvalidArgument, "relevance: empty question set");
    double s = 0.0;
    for (const auto& h : question_embeddings) {
        s += cosine(h, edit_embedding);
    }
    return s / static_cast<double>(question_embeddings.size());
}

double
redundancy(std::span<const Vector> question_embeddings) {
    EDITMEM_REQUIRE(!question_embeddings.empty(), ErrorKind::kInvalidArgument, "redundancy: empty question set");
    const size_t n = question_embeddings.size();
    if (n == 1) {
        return 0.0;
    }
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = i + 1; k < n; ++k) {
            s += cosine(question_embeddings[i], question_embeddings[k]);
        }
    }
    return 2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double
quality_score(double relevance, double redundancy, double gamma) {
    EDITMEM_REQUIRE(gamma >= 0.0, ErrorKind::kInvalidArgument, "quality_score: gamma must be >= 0");
    return relevance - gamma * redundancy;
}

const QuestionSet&
synthesize_for_edit(HierarchicalMemory& memory, EditId edit_id, Provider& provider, QuestionCache* cache) {
    const Edit& edit = memory.edit(edit_id);
    const std::string fact = edit.text;
    const int n_h = memory.config().n_h;
    const double gamma = memory.config().gamma;

    if (cache != nullptr) {
        auto hit = cache->get(CacheEntryKind::kScored, fact, n_h);
        // an entry written under another embedding dimension is treated as a miss
        if (hit && std::any_of(hit->embeddings.begin(), hit->embeddings.end(),
                               [&](const Vector& v) { return v.size() != memory.dim(); })) {
            hit.reset();
        }
        if (hit) {
            QuestionSet qs;
            qs.questions = std::move(hit->questions);
            qs.embeddings = std::move(hit->embeddings);
            qs.relevance = hit->relevance;
            qs.redundancy = hit->redundancy;
            if (!qs.questions.empty()) {
                qs.quality = quality_score(qs.relevance, qs.redundancy, gamma);
            }
            qs.provenance = QuestionProvenance::kCache;
            memory.set_question_set(edit_id, std::move(qs));
            return *memory.edit(edit_id).questions;
        }
    }

    std::vector<std::string> accepted;
    for (int round = 0; round < kMaxGenerationRounds && accepted.empty(); ++round) {
        auto candidates = provider.generate(fact, n_h);
        if (candidates.empty()) {
            throw_error(ErrorKind::kProvider, "provider returned zero questions for \"" + fact + "\"");
        }
        accepted = filter_questions_nothrow(fact, candidates).accepted;
    }
    if (accepted.size() > static_cast<size_t>(n_h)) {
        accepted.resize(n_h);
    }

    QuestionSet qs;
    qs.provenance = provider.kind() == ProviderKind::kRemote ? QuestionProvenance::kRemote : QuestionProvenance::kMock;
    if (!accepted.empty()) {
        qs.embeddings = embed_texts(provider, accepted);
        qs.questions = std::move(accepted);
        qs.relevance = relevance(edit.embedding, qs.embeddings);
        qs.redundancy = redundancy(qs.embeddings);
        qs.quality = quality_score(qs.relevance, qs.redundancy, gamma);
        if (cache != nullptr) {
            cache->put(CacheEntryKind::kScored, fact, n_h,
                       CachedQuestions{qs.questions, qs.embeddings, qs.relevance, qs.redundancy, qs.quality});
        }
    }
    memory.set_question_set(edit_id, std::move(qs));
    return *memory.edit(edit_id).questions;
}

void
synthesize_all(HierarchicalMemory& memory, Provider& provider, QuestionCache* cache) {
    for (EditId id = 0; id < static_cast<EditId>(memory.size()); ++id) {
        synthesize_for_edit(memory, id, provider, cache);
    }
}

}  // namespace editmem
