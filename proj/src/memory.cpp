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

#include "editmem/memory.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "editmem/error.h"

namespace editmem {

const char*
to_string(QuestionProvenance p) {
    switch (p) {
        case QuestionProvenance::kMock:
            return "mock";
        case QuestionProvenance::kRemote:
            return "remote";
        case QuestionProvenance::kCache:
            return "cache";
    }
    return "mock";
}

QuestionProvenance
provenance_from_string(const std::string& s) {
    if (s == "mock") return QuestionProvenance::kMock;
    if (s == "remote") return QuestionProvenance::kRemote;
    if (s == "cache") return QuestionProvenance::kCache;
    throw_error(ErrorKind::kData, "unknown question provenance '" + s + "'");
}

const char*
to_string(ProviderKind kind) {
    return kind == ProviderKind::kRemote ? "remote" : "mock";
}

ProviderKind
provider_kind_from_string(const std::string& s) {
    if (s == "mock" || s == "builtin-mock") return ProviderKind::kBuiltinMock;
    if (s == "remote") return ProviderKind::kRemote;
    throw_error(ErrorKind::kInvalidArgument, "unknown provider kind '" + s + "'");
}

void
validate(const ProviderConfig& cfg) {
    EDITMEM_REQUIRE(cfg.dim >= 2, ErrorKind::kInvalidArgument, "provider dim must be >= 2");
    EDITMEM_REQUIRE(cfg.kind != ProviderKind::kRemote || !cfg.endpoint.empty(), ErrorKind::kInvalidArgument,
                    "remote provider requires an endpoint (or ALEX_PROVIDER_URL)");
    EDITMEM_REQUIRE(cfg.retries >= 0 && cfg.timeout_ms > 0, ErrorKind::kInvalidArgument,
                    "provider retries/timeout out of range");
}

ProviderConfig
with_env_overrides(ProviderConfig cfg) {
    if (const char* url = std::getenv("ALEX_PROVIDER_URL"); url != nullptr && *url != '\0') {
        cfg.endpoint = url;
    }
    return cfg;
}

void
validate(const EngineConfig& c) {
    auto require = [](bool ok, const char* what) {
        EDITMEM_REQUIRE(ok, ErrorKind::kInvalidArgument, std::string("engine config: ") + what);
    };
    require(c.lambda >= 0.0 && c.lambda <= 1.0, "lambda must be in [0,1]");
    require(c.gamma >= 0.0, "gamma must be >= 0");
    require(c.tau > 0.0, "tau must be > 0");
    require(c.m_cap >= 1, "m_cap must be >= 1");
    require(c.n_h >= 1, "n_h must be >= 1");
    require(c.drop_ratio >= 0.0 && c.drop_ratio <= 1.0, "drop_ratio must be in [0,1]");
    require(c.lloyd_max_iter >= 1, "lloyd_max_iter must be >= 1");
    require(c.restarts >= 1, "restarts must be >= 1");
    require(c.anchor_count >= 1, "anchor_count must be >= 1");
    if (c.k_mode.automatic) {
        require(c.k_mode.k_min >= 2 && c.k_mode.k_min <= c.k_mode.k_max, "auto K needs 2 <= k_min <= k_max");
    } else {
        require(c.k_mode.fixed_k >= 1, "fixed K must be >= 1");
    }
}

int64_t
utf8_length(const std::string& s) {
    return std::count_if(s.begin(), s.end(), [](char ch) {
        return (static_cast<unsigned char>(ch) & 0xC0u) != 0x80u;
    });
}

int64_t
whitespace_token_count(const std::string& s) {
    int64_t count = 0;
    bool in_token = false;
    for (char ch : s) {
        const bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
        if (!space && !in_token) {
            ++count;
        }
        in_token = !space;
    }
    return count;
}

HierarchicalMemory::HierarchicalMemory(size_t dim, EngineConfig config, ProviderConfig provider)
    : dim_(dim), config_(config), provider_(std::move(provider)) {
    EDITMEM_REQUIRE(dim >= 2, ErrorKind::kInvalidArgument, "memory dim must be >= 2");
    validate(config_);
}

EditId
HierarchicalMemory::add_edit(std::string text, Vector embedding) {
    EDITMEM_REQUIRE(embedding.size() == dim_, ErrorKind::kInvalidArgument,
                    "add_edit: embedding dim " + std::to_string(embedding.size()) + " != memory dim " +
                        std::to_string(dim_));
    const int64_t words = whitespace_token_count(text);
    EDITMEM_REQUIRE(words > 0, ErrorKind::kInvalidArgument, "add_edit: empty text");
    EDITMEM_REQUIRE(is_unit_norm(embedding), ErrorKind::kInvalidArgument, "add_edit: embedding is not unit norm");

    Edit e;
    e.id = static_cast<EditId>(edits_.size());
    e.char_len = utf8_length(text);
    e.word_count = words;
    e.text = std::move(text);
    e.embedding = std::move(embedding);
    l_max_ = std::max(l_max_, e.char_len);
    w_max_ = std::max(w_max_, e.word_count);
    edits_.push_back(std::move(e));
    return edits_.back().id;
}

ClusterId
HierarchicalMemory::assign_to_nearest(EditId id) {
    EDITMEM_REQUIRE(!clusters_.empty(), ErrorKind::kState, "assign_to_nearest: no clusters built yet");
    const Edit& e = edit(id);
    ClusterId best = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (const auto& c : clusters_) {
        const double s = cosine_or_zero(e.embedding, c.centroid_embed);
        if (s > best_sim) {
            best_sim = s;
            best = c.id;
        }
    }
    if (e.cluster_id.has_value()) {
        if (*e.cluster_id == best) {
            return best;
        }
        auto& old = clusters_[*e.cluster_id].member_ids;
        old.erase(std::remove(old.begin(), old.end(), id), old.end());
    }
    auto& members = clusters_[best].member_ids;
    members.insert(std::upper_bound(members.begin(), members.end(), id), id);
    edits_[id].cluster_id = best;
    return best;
}

const Edit&
HierarchicalMemory::edit(EditId id) const {
    EDITMEM_REQUIRE(id >= 0 && static_cast<size_t>(id) < edits_.size(), ErrorKind::kInvalidArgument,
                    "unknown edit id " + std::to_string(id));
    return edits_[id];
}

const Cluster&
HierarchicalMemory::cluster(ClusterId id) const {
    EDITMEM_REQUIRE(id >= 0 && static_cast<size_t>(id) < clusters_.size(), ErrorKind::kInvalidArgument,
                    "unknown cluster id " + std::to_string(id));
    return clusters_[id];
}

void
HierarchicalMemory::set_question_set(EditId id, QuestionSet qs) {
    edit(id);
    qs.edit_id = id;
    edits_[id].questions = std::move(qs);
}

void
HierarchicalMemory::replace_clusters(std::vector<Cluster> clusters) {
    std::vector<std::optional<ClusterId>> owner(edits_.size());
    for (size_t c = 0; c < clusters.size(); ++c) {
        EDITMEM_REQUIRE(clusters[c].id == static_cast<ClusterId>(c), ErrorKind::kInvalidArgument,
                        "replace_clusters: cluster ids must be dense");
        for (EditId m : clusters[c].member_ids) {
            EDITMEM_REQUIRE(m >= 0 && static_cast<size_t>(m) < edits_.size(), ErrorKind::kInvalidArgument,
                            "replace_clusters: unknown member id");
            EDITMEM_REQUIRE(!owner[m].has_value(), ErrorKind::kInvalidArgument,
                            "replace_clusters: edit " + std::to_string(m) + " in two clusters");
            owner[m] = clusters[c].id;
        }
        std::sort(clusters[c].member_ids.begin(), clusters[c].member_ids.end());
    }
    clusters_ = std::move(clusters);
    for (size_t i = 0; i < edits_.size(); ++i) {
        edits_[i].cluster_id = owner[i];
    }
}

void
HierarchicalMemory::set_silhouettes(double global, std::span<const double> per_cluster) {
    EDITMEM_REQUIRE(per_cluster.size() == clusters_.size(), ErrorKind::kInvalidArgument,
                    "set_silhouettes: one value per cluster expected");
    silhouette_global_ = global;
    for (size_t c = 0; c < clusters_.size(); ++c) {
        clusters_[c].silhouette = per_cluster[c];
    }
}

void
HierarchicalMemory::recompute_maxima() {
    l_max_ = 0;
    w_max_ = 0;
    for (const auto& e : edits_) {
        l_max_ = std::max(l_max_, e.char_len);
        w_max_ = std::max(w_max_, e.word_count);
    }
}

void
HierarchicalMemory::check_invariants() const {
    auto fail = [](const std::string& what) { throw_error(ErrorKind::kData, "memory invariant: " + what); };
    std::vector<int> seen(edits_.size(), 0);
    for (size_t c = 0; c < clusters_.size(); ++c) {
        const auto& cl = clusters_[c];
        if (cl.id != static_cast<ClusterId>(c)) fail("cluster ids not dense");
        if (cl.centroid_embed.size() != dim_ || cl.centroid_full.size() != dim_ + 2) fail("centroid dimension");
        for (EditId m : cl.member_ids) {
            if (m < 0 || static_cast<size_t>(m) >= edits_.size()) fail("member id out of range");
            if (edits_[m].cluster_id != cl.id) fail("edit " + std::to_string(m) + " cluster_id disagrees");
            seen[m] += 1;
        }
    }
    for (size_t i = 0; i < edits_.size(); ++i) {
        const auto& e = edits_[i];
        if (e.id != static_cast<EditId>(i)) fail("edit ids not dense");
        if (e.embedding.size() != dim_) fail("edit " + std::to_string(i) + " embedding dimension");
        if (!is_unit_norm(e.embedding)) fail("edit " + std::to_string(i) + " embedding not unit norm");
        if (e.char_len != utf8_length(e.text)) fail("edit " + std::to_string(i) + " char_len");
        if (e.word_count != whitespace_token_count(e.text)) fail("edit " + std::to_string(i) + " word_count");
        if (e.char_len > l_max_ || e.word_count > w_max_) fail("maxima below an edit");
        if (e.cluster_id.has_value() && seen[i] != 1) fail("edit " + std::to_string(i) + " not in exactly one cluster");
        if (!e.cluster_id.has_value() && seen[i] != 0) fail("unassigned edit listed as a member");
        if (e.questions.has_value() && e.questions->questions.size() != e.questions->embeddings.size()) {
            fail("question set size mismatch");
        }
    }
}

}  // namespace editmem
