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

#include "editmem/dea.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "editmem/error.h"

namespace editmem {

ZScores
cluster_zscores(std::span<const double> query_embedding, std::span<const Vector> centroids_embed) {
    EDITMEM_REQUIRE(!centroids_embed.empty(), ErrorKind::kInvalidArgument, "cluster_zscores: no clusters");
    ZScores z;
    const size_t k = centroids_embed.size();
    z.similarities.resize(k);
    for (size_t i = 0; i < k; ++i) {
        z.similarities[i] = cosine_or_zero(query_embedding, centroids_embed[i]);
    }
    z.mean = std::accumulate(z.similarities.begin(), z.similarities.end(), 0.0) / static_cast<double>(k);
    double var = 0.0;
    for (double s : z.similarities) {
        var += (s - z.mean) * (s - z.mean);
    }
    z.std_dev = std::sqrt(var / static_cast<double>(k));
    z.zscores.assign(k, 0.0);
    if (z.std_dev < kDegenerateStd) {
        z.degenerate = true;
        return z;
    }
    for (size_t i = 0; i < k; ++i) {
        z.zscores[i] = (z.similarities[i] - z.mean) / z.std_dev;
    }
    return z;
}

ZScores
cluster_zscores(std::span<const double> query_embedding, const HierarchicalMemory& memory) {
    std::vector<Vector> centroids;
    centroids.reserve(memory.num_clusters());
    for (const auto& c : memory.clusters()) {
        centroids.push_back(c.centroid_embed);
    }
    return cluster_zscores(query_embedding, centroids);
}

ClusterSelection
filter_clusters(const ZScores& z, double zeta, int m_cap) {
    EDITMEM_REQUIRE(!z.similarities.empty(), ErrorKind::kInvalidArgument, "filter_clusters: no clusters");
    EDITMEM_REQUIRE(m_cap >= 1, ErrorKind::kInvalidArgument, "filter_clusters: m_cap must be >= 1");
    std::vector<ClusterId> order(z.similarities.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](ClusterId a, ClusterId b) { return z.similarities[a] > z.similarities[b]; });

    ClusterSelection sel;
    for (ClusterId c : order) {
        if (z.zscores[c] >= zeta) {
            sel.selected.push_back(c);
            if (static_cast<int>(sel.selected.size()) == m_cap) {
                break;
            }
        }
    }
    if (sel.selected.empty()) {
        sel.selected.push_back(order.front());
        sel.fallback = true;
    }
    return sel;
}

Adjudication
adjudicate(std::span<const double> query_embedding, const Edit& edit, double alpha, double beta) {
    Adjudication a;
    a.literal = cosine_or_zero(query_embedding, edit.embedding);
    if (edit.questions && !edit.questions->embeddings.empty()) {
        a.inferential = -std::numeric_limits<double>::infinity();
        for (const auto& h : edit.questions->embeddings) {
            a.inferential = std::max(a.inferential, cosine_or_zero(query_embedding, h));
        }
    } else {
        a.literal_only = true;
    }
    a.score = alpha * a.literal + beta * a.inferential;
    return a;
}

RetrievalOptions
RetrievalOptions::from(const EngineConfig& cfg) {
    RetrievalOptions o;
    o.alpha = cfg.alpha;
    o.beta = cfg.beta;
    o.zeta = cfg.zeta;
    o.m_cap = cfg.m_cap;
    return o;
}

namespace {

struct ScoredBatch {
    std::vector<double> literal;
    std::vector<double> inferential;
    std::vector<double> score;
    std::vector<uint8_t> has_questions;
};

ScoredBatch
score_edits(const HierarchicalMemory& memory, std::span<const double> query, std::span<const EditId> ids,
            double alpha, double beta, kernels::Backend backend) {
    std::vector<kernels::CandidateView> views;
    views.reserve(ids.size());
    for (EditId id : ids) {
        const Edit& e = memory.edit(id);
        views.push_back({e.embedding, e.questions ? &e.questions->embeddings : nullptr});
    }
    ScoredBatch b;
    b.literal.resize(ids.size());
    b.inferential.resize(ids.size());
    b.score.resize(ids.size());
    b.has_questions.resize(ids.size());
    kernels::adjudicate_batch(backend, query, views, alpha, beta,
                              {b.literal, b.inferential, b.score, b.has_questions});
    return b;
}

// Serial argmax; ties resolve to the lowest edit id whatever the scan order.
size_t
argmax_lowest_id(std::span<const double> scores, std::span<const EditId> ids) {
    size_t best = 0;
    for (size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best] || (scores[i] == scores[best] && ids[i] < ids[best])) {
            best = i;
        }
    }
    return best;
}

}  // namespace

RetrievalTrace
retrieve_embedded(const HierarchicalMemory& memory, const std::string& query, Vector query_embedding,
                  const RetrievalOptions& opts) {
    EDITMEM_REQUIRE(memory.size() > 0, ErrorKind::kState, "retrieve: memory is empty");
    EDITMEM_REQUIRE(memory.clustered(), ErrorKind::kState, "retrieve: memory is not clustered");
    EDITMEM_REQUIRE(query_embedding.size() == memory.dim(), ErrorKind::kInvalidArgument,
                    "retrieve: query dimension mismatch");

    RetrievalTrace t;
    t.query = query;
    t.query_embedding = std::move(query_embedding);

    const ZScores z = cluster_zscores(t.query_embedding, memory);
    const ClusterSelection sel = filter_clusters(z, opts.zeta, opts.m_cap);
    t.similarities = z.similarities;
    t.zscores = z.zscores;
    t.degenerate_std = z.degenerate;
    t.empty_filter = sel.fallback;
    t.selected_clusters = sel.selected;

    std::vector<EditId> ids;
    for (ClusterId c : sel.selected) {
        const auto& members = memory.cluster(c).member_ids;
        ids.insert(ids.end(), members.begin(), members.end());
    }
    t.candidates_examined = static_cast<int64_t>(memory.num_clusters() + ids.size());
    if (ids.empty()) {
        return t;  // selected clusters hold no edits
    }

    const auto b = score_edits(memory, t.query_embedding, ids, opts.alpha, opts.beta, opts.backend);
    t.candidates.reserve(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        const bool literal_only = b.has_questions[i] == 0;
        t.candidates.push_back({ids[i], b.literal[i], b.inferential[i], b.score[i], literal_only});
        t.no_questions = t.no_questions || literal_only;
    }
    const size_t w = argmax_lowest_id(b.score, ids);
    t.winner = ids[w];
    t.winner_score = b.score[w];
    return t;
}

RetrievalTrace
retrieve(const HierarchicalMemory& memory, const std::string& query_text, Provider& provider) {
    EDITMEM_REQUIRE(memory.size() > 0, ErrorKind::kState, "retrieve: memory is empty");
    auto emb = embed_texts(provider, {query_text});
    return retrieve_embedded(memory, query_text, std::move(emb.front()), RetrievalOptions::from(memory.config()));
}

FlatResult
flat_retrieve_embedded(const HierarchicalMemory& memory, std::span<const double> query_embedding, double alpha,
                       double beta, kernels::Backend backend) {
    EDITMEM_REQUIRE(memory.size() > 0, ErrorKind::kState, "flat_retrieve: memory is empty");
    std::vector<EditId> ids(memory.size());
    std::iota(ids.begin(), ids.end(), 0);
    auto b = score_edits(memory, query_embedding, ids, alpha, beta, backend);
    FlatResult r;
    const size_t w = argmax_lowest_id(b.score, ids);
    r.winner = ids[w];
    r.winner_score = b.score[w];
    r.scores = std::move(b.score);
    return r;
}

FlatResult
flat_retrieve(const HierarchicalMemory& memory, const std::string& query_text, Provider& provider) {
    EDITMEM_REQUIRE(memory.size() > 0, ErrorKind::kState, "flat_retrieve: memory is empty");
    const auto emb = embed_texts(provider, {query_text});
    return flat_retrieve_embedded(memory, emb.front(), memory.config().alpha, memory.config().beta);
}

nlohmann::json
trace_to_json(const RetrievalTrace& t) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : t.candidates) {
        cands.push_back({{"edit_id", c.edit_id},
                         {"literal", c.literal},
                         {"inferential", c.inferential},
                         {"score", c.score},
                         {"literal_only", c.literal_only}});
    }
    return {{"query", t.query},
            {"query_embedding", t.query_embedding},
            {"similarities", t.similarities},
            {"zscores", t.zscores},
            {"selected_clusters", t.selected_clusters},
            {"candidates", cands},
            {"winner", t.winner},
            {"winner_score", t.winner_score},
            {"candidates_examined", t.candidates_examined},
            {"fallback_flags",
             {{"degenerate_std", t.degenerate_std}, {"empty_filter", t.empty_filter}, {"no_questions", t.no_questions}}}};
}

}  // namespace editmem
