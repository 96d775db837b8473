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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "editmem/provider_config.h"
#include "editmem/vector_ops.h"

namespace editmem {

using EditId = int64_t;
using ClusterId = int32_t;

enum class QuestionProvenance { kMock, kRemote, kCache };

const char*
to_string(QuestionProvenance p);
QuestionProvenance
provenance_from_string(const std::string& s);

/// Hypothetical questions attached to one edit with their quality scores.
/// `quality` is unset when synthesis could not produce any acceptable question.
struct QuestionSet {
    EditId edit_id = 0;
    std::vector<std::string> questions;
    std::vector<Vector> embeddings;
    double relevance = 0.0;
    double redundancy = 0.0;
    std::optional<double> quality;
    QuestionProvenance provenance = QuestionProvenance::kMock;

    bool empty() const { return questions.empty(); }
    bool operator==(const QuestionSet&) const = default;
};

struct Edit {
    EditId id = 0;
    std::string text;
    Vector embedding;  // unit norm
    int64_t char_len = 0;
    int64_t word_count = 0;
    std::optional<ClusterId> cluster_id;
    std::optional<QuestionSet> questions;

    bool operator==(const Edit&) const = default;
};

struct Cluster {
    ClusterId id = 0;
    Vector centroid_full;   // d + 2 hybrid feature space
    Vector centroid_embed;  // first d components, renormalised (zero if they cancel)
    std::vector<EditId> member_ids;
    double silhouette = 0.0;

    bool operator==(const Cluster&) const = default;
};

struct KMode {
    bool automatic = false;
    int fixed_k = 12;
    int k_min = 2;
    int k_max = 20;

    static KMode fixed(int k) { return {false, k, k, k}; }
    static KMode
    range(int lo, int hi) {
        return {true, lo, lo, hi};
    }
    bool operator==(const KMode&) const = default;
};

struct EngineConfig {
    double lambda = 0.4;   // cohesion / contrast balance
    double gamma = 0.3;    // redundancy penalty in question-set quality
    double tau = 0.07;     // InfoNCE temperature
    double alpha = 0.5;    // literal evidence weight
    double beta = 0.5;     // inferential evidence weight
    double zeta = 1.0;     // cluster z-score threshold
    int m_cap = 3;         // max clusters searched per query
    int n_h = 3;           // hypothetical questions per edit
    double theta_s = 0.5;  // per-cluster silhouette floor
    double drop_ratio = 0.2;
    KMode k_mode;
    uint64_t seed = 42;

    // Clustering tunables.
    int lloyd_max_iter = 100;
    double lloyd_tol = 1e-6;
    int restarts = 5;
    int anchor_count = 8;
    double select_weight_s = 1.0;
    double select_weight_e = 0.5;

    bool operator==(const EngineConfig&) const = default;
};

/// Throws kInvalidArgument when a parameter is outside its documented range.
void
validate(const EngineConfig& cfg);

/// Number of Unicode code points in a UTF-8 string.
int64_t
utf8_length(const std::string& s);

/// Number of whitespace-separated tokens.
int64_t
whitespace_token_count(const std::string& s);

/// The clustered edit store.
///
/// Edits get dense ids in insertion order. Cluster membership is kept in two
/// places (Edit::cluster_id and Cluster::member_ids); every mutator keeps them
/// in sync and check_invariants() verifies the partition.
class HierarchicalMemory {
 public:
    HierarchicalMemory() = default;
    HierarchicalMemory(size_t dim, EngineConfig config, ProviderConfig provider = {});

    EditId
    add_edit(std::string text, Vector embedding);

    /// Puts an edit into the cluster whose embedding centroid is most similar
    /// (lowest cluster id on ties). Centroids are not moved.
    ClusterId
    assign_to_nearest(EditId id);

    size_t dim() const { return dim_; }
    size_t size() const { return edits_.size(); }
    size_t num_clusters() const { return clusters_.size(); }
    bool clustered() const { return !clusters_.empty(); }

    const Edit&
    edit(EditId id) const;
    std::span<const Edit> edits() const { return edits_; }
    std::span<const Cluster> clusters() const { return clusters_; }
    const Cluster&
    cluster(ClusterId id) const;

    int64_t l_max() const { return l_max_; }
    int64_t w_max() const { return w_max_; }

    const EngineConfig& config() const { return config_; }
    EngineConfig& mutable_config() { return config_; }
    const ProviderConfig& provider() const { return provider_; }

    double silhouette_peak() const { return silhouette_peak_; }
    double silhouette_global() const { return silhouette_global_; }

    void
    set_question_set(EditId id, QuestionSet qs);

    /// Installs a new set of clusters. Member lists must partition a subset of
    /// the edits; edits outside every list become unassigned.
    void
    replace_clusters(std::vector<Cluster> clusters);

    void
    set_silhouettes(double global, std::span<const double> per_cluster);
    void set_silhouette_peak(double peak) { silhouette_peak_ = peak; }

    /// Resets L_max / W_max to the exact maxima over the stored edits.
    void
    recompute_maxima();

    /// Throws kData describing the first broken invariant.
    void
    check_invariants() const;

    bool operator==(const HierarchicalMemory&) const = default;

 private:
    friend class IndexReader;

    size_t dim_ = 0;
    EngineConfig config_;
    ProviderConfig provider_;
    std::vector<Edit> edits_;
    std::vector<Cluster> clusters_;
    int64_t l_max_ = 0;
    int64_t w_max_ = 0;
    double silhouette_peak_ = 0.0;
    double silhouette_global_ = 0.0;
};

}  // namespace editmem
