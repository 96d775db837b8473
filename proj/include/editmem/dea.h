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

// Two-stage retrieval: z-score filtering over cluster centroids, then
// literal + inferential adjudication of the edits inside the kept clusters.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "editmem/kernels.h"
#include "editmem/memory.h"
#include "editmem/provider.h"

namespace editmem {

/// Population standard deviations below this are treated as zero.
inline constexpr double kDegenerateStd = 1e-12;

struct ZScores {
    std::vector<double> similarities;
    std::vector<double> zscores;
    double mean = 0.0;
    double std_dev = 0.0;  // population
    bool degenerate = false;
};

/// s_i = cos(query, centroid_i), z_i = (s_i - mean) / std. When the std is
/// (numerically) zero every z_i is 0 and `degenerate` is set.
ZScores
cluster_zscores(std::span<const double> query_embedding, std::span<const Vector> centroids_embed);

ZScores
cluster_zscores(std::span<const double> query_embedding, const HierarchicalMemory& memory);

struct ClusterSelection {
    std::vector<ClusterId> selected;  // descending similarity, ties by lower id
    bool fallback = false;            // nothing passed zeta; kept the top cluster
};

/// Keeps clusters with z_i >= zeta, at most m_cap of them (highest similarity
/// first). Never returns an empty selection.
ClusterSelection
filter_clusters(const ZScores& z, double zeta, int m_cap);

struct Adjudication {
    double literal = 0.0;
    double inferential = 0.0;  // max over the question set, 0 when there is none
    double score = 0.0;
    bool literal_only = false;
};

Adjudication
adjudicate(std::span<const double> query_embedding, const Edit& edit, double alpha, double beta);

struct CandidateScore {
    EditId edit_id = 0;
    double literal = 0.0;
    double inferential = 0.0;
    double score = 0.0;
    bool literal_only = false;
};

struct RetrievalTrace {
    std::string query;
    Vector query_embedding;
    std::vector<double> similarities;
    std::vector<double> zscores;
    std::vector<ClusterId> selected_clusters;
    std::vector<CandidateScore> candidates;
    EditId winner = -1;
    double winner_score = 0.0;
    int64_t candidates_examined = 0;  // K centroid comparisons + edits scored
    bool degenerate_std = false;
    bool empty_filter = false;
    bool no_questions = false;  // at least one candidate was scored literal-only
};

nlohmann::json
trace_to_json(const RetrievalTrace& trace);

struct RetrievalOptions {
    double alpha = 0.5;
    double beta = 0.5;
    double zeta = 1.0;
    int m_cap = 3;
    kernels::Backend backend = kernels::default_backend();

    static RetrievalOptions from(const EngineConfig& cfg);
};

/// Retrieval for an already-embedded query.
RetrievalTrace
retrieve_embedded(const HierarchicalMemory& memory, const std::string& query, Vector query_embedding,
                  const RetrievalOptions& opts);

/// Embeds `query_text` with `provider` and runs retrieve_embedded with the
/// memory's configured parameters.
RetrievalTrace
retrieve(const HierarchicalMemory& memory, const std::string& query_text, Provider& provider);

struct FlatResult {
    EditId winner = -1;
    double winner_score = 0.0;
    std::vector<double> scores;  // indexed by edit id
};

/// Exhaustive adjudication of every edit, ignoring clusters.
FlatResult
flat_retrieve_embedded(const HierarchicalMemory& memory, std::span<const double> query_embedding, double alpha,
                       double beta, kernels::Backend backend = kernels::default_backend());

FlatResult
flat_retrieve(const HierarchicalMemory& memory, const std::string& query_text, Provider& provider);

}  // namespace editmem
