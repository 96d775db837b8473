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
#include <span>
#include <string>
#include <vector>

#include "editmem/memory.h"
#include "editmem/provider.h"
#include "editmem/question_cache.h"

namespace editmem {

/// Rejection reasons, combinable as a bit set.
enum RejectReason : uint32_t {
    kRejectTooShort = 1u << 0,     // fewer than 3 whitespace tokens
    kRejectNoEntity = 1u << 1,     // no digit-bearing or non-initial capitalised token
    kRejectLowOverlap = 1u << 2,   // < 60% of content tokens shared with the edit
};

inline constexpr size_t kMinQuestionTokens = 3;
inline constexpr double kMinQuestionOverlap = 0.6;

/// Function words ignored by the overlap rule.
std::span<const char* const>
overlap_stop_words();

struct Rejection {
    size_t index = 0;  // position in the candidate list
    std::string question;
    uint32_t reasons = 0;
};

struct FilterResult {
    std::vector<std::string> accepted;  // input order
    std::vector<Rejection> rejected;
};

/// Fraction of the question's content tokens that also occur in the edit
/// (lowercased, stop words removed). Zero when the question has no content tokens.
double
unigram_overlap(const std::string& edit_text, const std::string& question);

/// Applies the token-count, entity and overlap rules. Throws kData (with the
/// rejections in the message) when nothing survives so callers can regenerate;
/// use filter_questions_nothrow to inspect the outcome instead.
FilterResult
filter_questions(const std::string& edit_text, const std::vector<std::string>& candidates);

FilterResult
filter_questions_nothrow(const std::string& edit_text, const std::vector<std::string>& candidates);

/// Mean cosine of each question to the edit.
double
relevance(std::span<const double> edit_embedding, std::span<const Vector> question_embeddings);

/// Mean pairwise cosine among the questions; 0 for a single question.
double
redundancy(std::span<const Vector> question_embeddings);

double
quality_score(double relevance, double redundancy, double gamma);

/// Maximum generate-and-filter rounds before giving up on an edit.
inline constexpr int kMaxGenerationRounds = 3;

/// Produces (or fetches from `cache`) the scored question set of one edit and
/// stores it in the memory. When every round is filtered out the edit gets an
/// empty set with unset quality.
const QuestionSet&
synthesize_for_edit(HierarchicalMemory& memory, EditId edit_id, Provider& provider, QuestionCache* cache);

/// synthesize_for_edit over every edit, in id order.
void
synthesize_all(HierarchicalMemory& memory, Provider& provider, QuestionCache* cache);

}  // namespace editmem
