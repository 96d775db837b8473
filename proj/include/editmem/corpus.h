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

// Ingestion of edit corpora (plain line files and MQuAKE case files) and of
// externally produced prediction files.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "editmem/memory.h"

namespace editmem {

enum class CorpusFormat { kPlain, kMquake };

CorpusFormat
corpus_format_from_string(const std::string& s);

struct PathHop {
    std::string entity;  // may be empty; only answers are compared then
    std::string answer;

    bool operator==(const PathHop&) const = default;
};

enum class RecordKind { kQuery, kMultiHop, kSingleHop };

struct EvalRecord {
    std::string query;
    std::optional<EditId> gold_edit_id;        // unset: excluded from cluster/retrieval accuracy
    std::optional<ClusterId> gold_cluster_id;  // filled by resolve_gold_clusters
    std::optional<std::string> gold_answer;
    std::vector<PathHop> gold_path;
    std::optional<std::string> predicted_answer;
    std::optional<std::vector<PathHop>> predicted_path;
    std::optional<size_t> case_index;  // records of one case share a prediction
    int hops = 0;
    RecordKind kind = RecordKind::kQuery;
};

struct CorpusWarning {
    size_t line = 0;  // 1-based; 0 for file-level warnings
    std::string message;
};

struct EditCorpus {
    std::vector<std::string> edits;  // edit i becomes EditId i when added in order
    std::vector<EvalRecord> records;
    size_t num_cases = 0;
    size_t skipped = 0;
    size_t excluded_from_retrieval = 0;  // records without a gold edit
    std::map<int, size_t> hop_strata;    // hop count -> number of cases
    std::vector<CorpusWarning> warnings;
};

/// Plain: each non-blank line is either raw edit text or a JSON object. An
/// object with "text" is an edit (optional "id", "query"/"queries" whose gold
/// is that edit); an object with "query" and "gold_id" is a record whose gold
/// is the edit carrying that "id" (or that 0-based edit index when edits have
/// no ids). Optional "answer" and "path" fill the gold answer fields.
///
/// MQuAKE: a JSON array (or one case per line) of cases. Rewrites become
/// edits "<prompt with subject> <target>", de-duplicated by text. Multi-hop
/// questions get the rewrite as gold when the case has exactly one; each
/// single-hop question whose answer is a rewrite's new target gets that
/// rewrite as gold.
///
/// Malformed records are skipped and reported in `warnings` with line numbers.
/// Throws kData when the file cannot be read.
EditCorpus
load_edit_corpus(const std::string& path, CorpusFormat format);

EditCorpus
parse_edit_corpus(const std::string& content, CorpusFormat format);

struct Prediction {
    std::string answer;
    std::optional<std::vector<PathHop>> path;
};

/// JSON lines with "predicted_answer" (or "answer") and optional
/// "predicted_path" (or "path"); a path hop is a string answer or an
/// {"entity", "answer"} object. An "index" field places the record at that
/// case index, otherwise line order is used.
std::vector<std::optional<Prediction>>
load_predictions(const std::string& path);

/// Attaches predictions to records by case index. In plain corpora every
/// record is its own case. Returns how many records received a prediction.
size_t
attach_predictions(std::vector<EvalRecord>& records, const std::vector<std::optional<Prediction>>& predictions);

}  // namespace editmem
