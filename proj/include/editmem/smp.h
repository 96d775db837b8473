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

// Semantic partitioning of the edit memory: hybrid features, anchor-weighted
// k-means++ seeding, Lloyd refinement, silhouette scoring, automatic K
// selection, the cohesion/contrastive diagnostics and the adaptation checks
// that decide when to recluster.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "editmem/kernels.h"
#include "editmem/memory.h"
#include "editmem/vector_ops.h"

namespace editmem {

/// Floor added to every anchor weight so that no point has zero sampling mass.
inline constexpr double kAnchorWeightFloor = 1e-6;

/// concat(embedding, min(char_len / l_max, 1), min(word_count / w_max, 1)).
Vector
build_feature(const Edit& edit, int64_t l_max, int64_t w_max);

/// One feature row per edit (row i is edit i), using the memory's maxima.
Matrix
build_features(const HierarchicalMemory& memory);

/// Farthest-point sampling of `count` anchor rows, starting from a
/// seed-chosen row. Stops early when all remaining rows coincide with an anchor.
std::vector<size_t>
select_anchors(const Matrix& features, int count, uint64_t seed);

/// k-means++ seeding where every sampling weight is multiplied by the row's
/// anchor affinity max(0, max_a cos(f_i, f_a)) + kAnchorWeightFloor.
Matrix
kmeanspp_init(const Matrix& features, int k, std::span<const size_t> anchors, uint64_t seed,
              kernels::Backend backend = kernels::default_backend());

struct ClusterModel {
    Matrix centroids;
    std::vector<int32_t> assignment;
    double inertia = 0.0;                 // within-cluster sum of squares W(K)
    std::vector<double> inertia_history;  // after seeding, then after every step
    int iterations = 0;
    bool converged = false;  // true when the last pass reassigned nothing
    double silhouette_global = 0.0;
    std::vector<double> silhouette_per_cluster;

    int k() const { return static_cast<int>(centroids.rows()); }
};

/// Lloyd iterations with Euclidean assignment and mean updates. An empty
/// cluster takes the point farthest from the centroid of the largest cluster.
ClusterModel
lloyd_cluster(const Matrix& features, Matrix init_centroids, int max_iter, double tol,
              kernels::Backend backend = kernels::default_backend());

struct SilhouetteResult {
    double global = 0.0;
    std::vector<double> per_cluster;
    bool degenerate = false;  // fewer than two clusters; everything reported as 0
};

SilhouetteResult
silhouette(const Matrix& features, std::span<const int32_t> assignment, int k,
           kernels::Backend backend = kernels::default_backend());

struct ClusteringParams {
    int restarts = 5;
    int max_iter = 100;
    double tol = 1e-6;
    int anchor_count = 8;
};

/// Best (lowest inertia) of `restarts` seeded runs at a fixed K.
ClusterModel
cluster_best_of(const Matrix& features, int k, const ClusteringParams& params, uint64_t seed,
                kernels::Backend backend = kernels::default_backend());

struct KSelectionConfig {
    int k_min = 2;
    int k_max = 20;
    double weight_s = 1.0;
    double weight_e = 0.5;
    ClusteringParams clustering;
};

struct KDiagnostics {
    int k = 0;
    double inertia = 0.0;
    double silhouette = 0.0;
    double elbow_gap = 0.0;
    double objective = 0.0;
};

struct KSelection {
    int k_star = 0;
    std::vector<KDiagnostics> table;  // ordered by K
    ClusterModel best;                // model at k_star
};

/// Sweeps K over [k_min, k_max] and returns argmax of
/// weight_s * S(K) - weight_e * E(K), ties to the smaller K, where S is the
/// global silhouette and E(K) = (W(K) - W(K+1)) / W(k_min) is the inertia
/// still recoverable by one more cluster.
KSelection
select_k(const Matrix& features, const KSelectionConfig& cfg, uint64_t seed,
         kernels::Backend backend = kernels::default_backend());

// --- diagnostic losses -----------------------------------------------------

struct ClusterMembers {
    Vector centroid;  // embedding-space centroid
    std::vector<Vector> members;
};

/// -(1/K) sum_c mean_{e in c} cos(e, mu_c). Throws on an empty cluster.
double
cohesion_loss(std::span<const ClusterMembers> clusters);

double
cohesion_loss(const HierarchicalMemory& memory);

/// -log(exp(s+/tau) / (exp(s+/tau) + sum_neg exp(s-/tau))) with cosine s.
double
info_nce(std::span<const double> anchor, std::span<const double> positive, std::span<const Vector> negatives,
         double tau);

struct DiagnosticPair {
    Vector query;     // anchor (synthesised question, or the edit itself)
    Vector positive;  // the edit
    ClusterId cluster = 0;
};

/// Mean InfoNCE over the batch; the negatives of pair i are the positives of
/// every pair from a different cluster. Throws if a pair has no negatives.
double
contrast_loss(std::span<const DiagnosticPair> batch, double tau);

/// One pair per clustered edit; the anchor is the edit's first hypothetical
/// question embedding when it has one.
std::vector<DiagnosticPair>
make_diagnostic_batch(const HierarchicalMemory& memory);

double
total_diag_loss(double cohesion, double contrast, double lambda);

// --- adaptation ------------------------------------------------------------

struct AdaptationReport {
    std::vector<ClusterId> low_clusters;  // silhouette below theta_s
    bool global_drop = false;             // global < (1 - drop_ratio) * peak
    double global = 0.0;
    double peak = 0.0;

    bool any() const { return global_drop || !low_clusters.empty(); }
};

AdaptationReport
check_adaptation(std::span<const double> per_cluster, double global, double peak, double theta_s, double drop_ratio);

/// Uses the silhouettes stored in the memory. Memories with fewer than two
/// clusters never trigger.
AdaptationReport
check_adaptation(const HierarchicalMemory& memory);

struct ClusteringReport {
    int k = 0;
    std::optional<KSelection> selection;  // set in automatic K mode
    double inertia = 0.0;
    double silhouette_global = 0.0;
    std::vector<size_t> cluster_sizes;
};

/// Full rebuild: exact maxima, features, K (fixed or selected), clustering,
/// silhouettes. Resets the silhouette peak to the new global value.
ClusteringReport
cluster_memory(HierarchicalMemory& memory, kernels::Backend backend = kernels::default_backend());

/// Global drop -> full rebuild. Otherwise pools the members of the
/// low-silhouette clusters and reclusters them into the same number of
/// clusters (reusing their ids); other memberships are untouched. Centroids,
/// maxima and silhouettes are refreshed and the peak only moves up.
/// Throws kInvalidArgument when the report has no trigger.
void
partial_recluster(HierarchicalMemory& memory, const AdaptationReport& trigger,
                  kernels::Backend backend = kernels::default_backend());

/// Recomputes per-cluster and global silhouettes for the current assignment
/// (assigned edits only). Does not touch the peak.
void
refresh_silhouettes(HierarchicalMemory& memory, kernels::Backend backend = kernels::default_backend());

}  // namespace editmem
