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

#include "editmem/smp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "editmem/error.h"
#include "editmem/mock_embedder.h"

namespace editmem {

namespace {

uint64_t
derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
    SplitMix64 rng(seed ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xD1B54A32D192ED03ull));
    return rng.next();
}

// Index drawn with probability proportional to weights[i]; -1 if the total is 0.
int64_t
sample_weighted(std::span<const double> weights, std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0.0)) {
        return -1;
    }
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    int64_t last_positive = -1;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        acc += weights[i];
        last_positive = static_cast<int64_t>(i);
        if (u < acc) {
            return last_positive;
        }
    }
    return last_positive;  // u landed on the rounding tail
}

double
assigned_inertia(const Matrix& features, const Matrix& centroids, std::span<const int32_t> assignment) {
    double w = 0.0;
    for (size_t i = 0; i < features.rows(); ++i) {
        w += l2_distance_sq(features.row(i), centroids.row(assignment[i]));
    }
    return w;
}

// Mean update, repairing empty clusters first.
void
update_centroids(const Matrix& features, Matrix& centroids, std::vector<int32_t>& assignment) {
    const size_t k = centroids.rows();
    std::vector<size_t> counts(k, 0);
    for (int32_t a : assignment) {
        counts[a] += 1;
    }
    for (size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) {
            continue;
        }
        const auto largest = static_cast<int32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        if (counts[largest] < 2) {
            break;  // k > n; nothing to steal
        }
        size_t far = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < features.rows(); ++i) {
            if (assignment[i] != largest) {
                continue;
            }
            const double d = l2_distance_sq(features.row(i), centroids.row(largest));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        assignment[far] = static_cast<int32_t>(c);
        counts[largest] -= 1;
        counts[c] = 1;
    }

    Matrix sums(k, features.cols());
    for (size_t i = 0; i < features.rows(); ++i) {
        auto dst = sums.row(assignment[i]);
        const auto src = features.row(i);
        for (size_t j = 0; j < src.size(); ++j) {
            dst[j] += src[j];
        }
    }
    for (size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            continue;  // keep the old centroid
        }
        auto dst = centroids.row(c);
        const auto s = sums.row(c);
        for (size_t j = 0; j < s.size(); ++j) {
            dst[j] = s[j] / static_cast<double>(counts[c]);
        }
    }
}

Vector
embedding_block(std::span<const double> full, size_t dim) {
    Vector v(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(dim));
    if (!normalize(v)) {
        std::fill(v.begin(), v.end(), 0.0);
    }
    return v;
}

ClusteringParams
params_from(const EngineConfig& cfg) {
    return {cfg.restarts, cfg.lloyd_max_iter, cfg.lloyd_tol, cfg.anchor_count};
}

// Rows of the assigned edits plus their cluster labels.
struct AssignedView {
    Matrix features;
    std::vector<int32_t> assignment;
    std::vector<EditId> ids;
};

AssignedView
assigned_view(const HierarchicalMemory& memory) {
    AssignedView v;
    std::vector<Vector> rows;
    for (const auto& e : memory.edits()) {
        if (e.cluster_id.has_value()) {
            rows.push_back(build_feature(e, memory.l_max(), memory.w_max()));
            v.assignment.push_back(*e.cluster_id);
            v.ids.push_back(e.id);
        }
    }
    v.features = Matrix::from_rows(rows);
    return v;
}

}  // namespace

Vector
build_feature(const Edit& edit, int64_t l_max, int64_t w_max) {
    EDITMEM_REQUIRE(l_max > 0 && w_max > 0, ErrorKind::kInvalidArgument, "build_feature: maxima must be positive");
    Vector f;
    f.reserve(edit.embedding.size() + 2);
    f.insert(f.end(), edit.embedding.begin(), edit.embedding.end());
    f.push_back(std::min(static_cast<double>(edit.char_len) / static_cast<double>(l_max), 1.0));
    f.push_back(std::min(static_cast<double>(edit.word_count) / static_cast<double>(w_max), 1.0));
    return f;
}

Matrix
build_features(const HierarchicalMemory& memory) {
    Matrix m(memory.size(), memory.dim() + 2);
    for (const auto& e : memory.edits()) {
        const Vector f = build_feature(e, memory.l_max(), memory.w_max());
        std::copy(f.begin(), f.end(), m.row(e.id).begin());
    }
    return m;
}

std::vector<size_t>
select_anchors(const Matrix& features, int count, uint64_t seed) {
    EDITMEM_REQUIRE(!features.empty(), ErrorKind::kInvalidArgument, "select_anchors: empty feature list");
    const size_t n = features.rows();
    const size_t want = std::min<size_t>(std::max(count, 1), n);
    std::vector<size_t> anchors{static_cast<size_t>(SplitMix64(seed).next() % n)};
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    while (anchors.size() < want) {
        const auto last = features.row(anchors.back());
        size_t far = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
            min_d[i] = std::min(min_d[i], l2_distance_sq(features.row(i), last));
            if (min_d[i] > far_d) {
                far_d = min_d[i];
                far = i;
            }
        }
        if (far_d <= 0.0) {
            break;
        }
        anchors.push_back(far);
    }
    return anchors;
}

Matrix
kmeanspp_init(const Matrix& features, int k, std::span<const size_t> anchors, uint64_t seed,
              kernels::Backend backend) {
    EDITMEM_REQUIRE(!features.empty(), ErrorKind::kInvalidArgument, "kmeanspp_init: empty feature list");
    EDITMEM_REQUIRE(k >= 1 && static_cast<size_t>(k) <= features.rows(), ErrorKind::kInvalidArgument,
                    "kmeanspp_init: k must be in [1, N]");
    EDITMEM_REQUIRE(!anchors.empty(), ErrorKind::kInvalidArgument, "kmeanspp_init: no anchors");
    const size_t n = features.rows();

    std::vector<double> anchor_w(n);
    for (size_t i = 0; i < n; ++i) {
        double best = 0.0;
        for (size_t a : anchors) {
            best = std::max(best, cosine_or_zero(features.row(i), features.row(a)));
        }
        anchor_w[i] = best + kAnchorWeightFloor;
    }

    std::mt19937_64 rng(seed);
    Matrix centroids(k, features.cols());
    std::vector<uint8_t> chosen(n, 0);
    std::vector<double> dist_sq(n, std::numeric_limits<double>::infinity());
    std::vector<double> weights(n);

    auto take = [&](size_t c, size_t idx) {
        chosen[idx] = 1;
        const auto src = features.row(idx);
        std::copy(src.begin(), src.end(), centroids.row(c).begin());
        kernels::update_min_dist_sq(backend, features, centroids.row(c), dist_sq);
    };

    take(0, static_cast<size_t>(sample_weighted(anchor_w, rng)));
    for (int c = 1; c < k; ++c) {
        for (size_t i = 0; i < n; ++i) {
            weights[i] = dist_sq[i] * anchor_w[i];
        }
        int64_t idx = sample_weighted(weights, rng);
        if (idx < 0) {
            // Every remaining point coincides with a centroid: take the lowest unused row.
            idx = static_cast<int64_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
        }
        take(c, static_cast<size_t>(idx));
    }
    return centroids;
}

ClusterModel
lloyd_cluster(const Matrix& features, Matrix init_centroids, int max_iter, double tol, kernels::Backend backend) {
    EDITMEM_REQUIRE(!features.empty() && !init_centroids.empty(), ErrorKind::kInvalidArgument,
                    "lloyd_cluster: empty input");
    EDITMEM_REQUIRE(init_centroids.cols() == features.cols(), ErrorKind::kInvalidArgument,
                    "lloyd_cluster: centroid dimension mismatch");
    EDITMEM_REQUIRE(max_iter >= 1, ErrorKind::kInvalidArgument, "lloyd_cluster: max_iter must be >= 1");

    const size_t n = features.rows();
    ClusterModel m;
    m.centroids = std::move(init_centroids);
    m.assignment.assign(n, 0);
    std::vector<double> dist_sq(n);
    std::vector<int32_t> next(n);

    auto total = [&] { return std::accumulate(dist_sq.begin(), dist_sq.end(), 0.0); };

    kernels::assign_nearest(backend, features, m.centroids, m.assignment, dist_sq);
    m.inertia_history.push_back(total());

    for (m.iterations = 0; m.iterations < max_iter;) {
        update_centroids(features, m.centroids, m.assignment);
        kernels::assign_nearest(backend, features, m.centroids, next, dist_sq);
        ++m.iterations;
        const bool changed = next != m.assignment;
        m.assignment.swap(next);
        const double prev = m.inertia_history.back();
        const double cur = total();
        m.inertia_history.push_back(cur);
        if (!changed) {
            m.converged = true;
            break;
        }
        if (prev - cur <= tol * prev) {
            break;
        }
    }
    if (!m.converged) {
        // Leave centroids equal to the means of the final assignment.
        update_centroids(features, m.centroids, m.assignment);
        m.inertia_history.push_back(assigned_inertia(features, m.centroids, m.assignment));
    }
    m.inertia = m.inertia_history.back();
    return m;
}

SilhouetteResult
silhouette(const Matrix& features, std::span<const int32_t> assignment, int k, kernels::Backend backend) {
    SilhouetteResult r;
    r.per_cluster.assign(std::max(k, 0), 0.0);
    if (k < 2 || features.rows() < 2) {
        r.degenerate = true;
        return r;
    }
    std::vector<double> scores(features.rows());
    kernels::silhouette_scores(backend, features, assignment, k, scores);
    std::vector<size_t> counts(k, 0);
    double sum = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        sum += scores[i];
        r.per_cluster[assignment[i]] += scores[i];
        counts[assignment[i]] += 1;
    }
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            r.per_cluster[c] /= static_cast<double>(counts[c]);
        }
    }
    r.global = sum / static_cast<double>(scores.size());
    return r;
}

ClusterModel
cluster_best_of(const Matrix& features, int k, const ClusteringParams& params, uint64_t seed,
                kernels::Backend backend) {
    EDITMEM_REQUIRE(params.restarts >= 1, ErrorKind::kInvalidArgument, "cluster_best_of: restarts must be >= 1");
    std::optional<ClusterModel> best;
    for (int r = 0; r < params.restarts; ++r) {
        const uint64_t s = derive_seed(seed, static_cast<uint64_t>(k), static_cast<uint64_t>(r));
        const auto anchors = select_anchors(features, params.anchor_count, s);
        auto init = kmeanspp_init(features, k, anchors, derive_seed(s, 1), backend);
        auto model = lloyd_cluster(features, std::move(init), params.max_iter, params.tol, backend);
        if (!best || model.inertia < best->inertia) {
            best = std::move(model);
        }
    }
    auto sil = silhouette(features, best->assignment, k, backend);
    best->silhouette_global = sil.global;
    best->silhouette_per_cluster = std::move(sil.per_cluster);
    return std::move(*best);
}

KSelection
select_k(const Matrix& features, const KSelectionConfig& cfg, uint64_t seed, kernels::Backend backend) {
    const auto n = static_cast<int>(features.rows());
    EDITMEM_REQUIRE(cfg.k_min >= 2 && cfg.k_min <= cfg.k_max && cfg.k_max < n, ErrorKind::kInvalidArgument,
                    "select_k: need 2 <= k_min <= k_max < N (N=" + std::to_string(n) + ")");

    KSelection sel;
    std::vector<ClusterModel> models;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        models.push_back(cluster_best_of(features, k, cfg.clustering, seed, backend));
    }
    // W(k_max + 1) only feeds the last elbow gap.
    const double w_next = cluster_best_of(features, cfg.k_max + 1, cfg.clustering, seed, backend).inertia;
    const double w_ref = models.front().inertia;

    double best_obj = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < models.size(); ++i) {
        KDiagnostics d;
        d.k = cfg.k_min + static_cast<int>(i);
        d.inertia = models[i].inertia;
        d.silhouette = models[i].silhouette_global;
        const double w_after = i + 1 < models.size() ? models[i + 1].inertia : w_next;
        d.elbow_gap = w_ref > 0.0 ? (d.inertia - w_after) / w_ref : 0.0;
        d.objective = cfg.weight_s * d.silhouette - cfg.weight_e * d.elbow_gap;
        if (d.objective > best_obj) {
            best_obj = d.objective;
            sel.k_star = d.k;
        }
        sel.table.push_back(d);
    }
    sel.best = std::move(models[sel.k_star - cfg.k_min]);
    return sel;
}

double
cohesion_loss(std::span<const ClusterMembers> clusters) {
    EDITMEM_REQUIRE(!clusters.empty(), ErrorKind::kInvalidArgument, "cohesion_loss: no clusters");
    double acc = 0.0;
    for (const auto& c : clusters) {
        EDITMEM_REQUIRE(!c.members.empty(), ErrorKind::kInvalidArgument, "cohesion_loss: empty cluster");
        double s = 0.0;
        for (const auto& e : c.members) {
            s += cosine_or_zero(e, c.centroid);
        }
        acc += s / static_cast<double>(c.members.size());
    }
    return -acc / static_cast<double>(clusters.size());
}

double
cohesion_loss(const HierarchicalMemory& memory) {
    std::vector<ClusterMembers> groups;
    for (const auto& c : memory.clusters()) {
        ClusterMembers g{c.centroid_embed, {}};
        for (EditId id : c.member_ids) {
            g.members.push_back(memory.edit(id).embedding);
        }
        groups.push_back(std::move(g));
    }
    return cohesion_loss(groups);
}

double
info_nce(std::span<const double> anchor, std::span<const double> positive, std::span<const Vector> negatives,
         double tau) {
    EDITMEM_REQUIRE(tau > 0.0, ErrorKind::kInvalidArgument, "info_nce: tau must be > 0");
    EDITMEM_REQUIRE(!negatives.empty(), ErrorKind::kInvalidArgument, "info_nce: no negatives");
    const double pos = cosine(anchor, positive) / tau;
    std::vector<double> logits{pos};
    for (const auto& neg : negatives) {
        logits.push_back(cosine(anchor, neg) / tau);
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) {
        z += std::exp(l - mx);
    }
    return (mx + std::log(z)) - pos;
}

double
contrast_loss(std::span<const DiagnosticPair> batch, double tau) {
    EDITMEM_REQUIRE(!batch.empty(), ErrorKind::kInvalidArgument, "contrast_loss: empty batch");
    double acc = 0.0;
    std::vector<Vector> negatives;
    for (size_t i = 0; i < batch.size(); ++i) {
        negatives.clear();
        for (size_t j = 0; j < batch.size(); ++j) {
            if (batch[j].cluster != batch[i].cluster) {
                negatives.push_back(batch[j].positive);
            }
        }
        EDITMEM_REQUIRE(!negatives.empty(), ErrorKind::kInvalidArgument,
                        "contrast_loss: pair " + std::to_string(i) + " has no negatives");
        acc += info_nce(batch[i].query, batch[i].positive, negatives, tau);
    }
    return acc / static_cast<double>(batch.size());
}

std::vector<DiagnosticPair>
make_diagnostic_batch(const HierarchicalMemory& memory) {
    std::vector<DiagnosticPair> batch;
    for (const auto& e : memory.edits()) {
        if (!e.cluster_id) {
            continue;
        }
        DiagnosticPair p;
        p.query = (e.questions && !e.questions->embeddings.empty()) ? e.questions->embeddings.front() : e.embedding;
        p.positive = e.embedding;
        p.cluster = *e.cluster_id;
        batch.push_back(std::move(p));
    }
    return batch;
}

double
total_diag_loss(double cohesion, double contrast, double lambda) {
    EDITMEM_REQUIRE(lambda >= 0.0 && lambda <= 1.0, ErrorKind::kInvalidArgument, "lambda must be in [0,1]");
    return lambda * cohesion + (1.0 - lambda) * contrast;
}

AdaptationReport
check_adaptation(std::span<const double> per_cluster, double global, double peak, double theta_s,
                 double drop_ratio) {
    AdaptationReport r;
    r.global = global;
    r.peak = peak;
    for (size_t c = 0; c < per_cluster.size(); ++c) {
        if (per_cluster[c] < theta_s) {
            r.low_clusters.push_back(static_cast<ClusterId>(c));
        }
    }
    r.global_drop = global < (1.0 - drop_ratio) * peak;
    return r;
}

AdaptationReport
check_adaptation(const HierarchicalMemory& memory) {
    if (memory.num_clusters() < 2) {
        return AdaptationReport{{}, false, memory.silhouette_global(), memory.silhouette_peak()};
    }
    std::vector<double> per;
    for (const auto& c : memory.clusters()) {
        per.push_back(c.silhouette);
    }
    const auto& cfg = memory.config();
    return check_adaptation(per, memory.silhouette_global(), memory.silhouette_peak(), cfg.theta_s, cfg.drop_ratio);
}

ClusteringReport
cluster_memory(HierarchicalMemory& memory, kernels::Backend backend) {
    EDITMEM_REQUIRE(memory.size() > 0, ErrorKind::kState, "cluster_memory: memory has no edits");
    memory.recompute_maxima();
    const Matrix features = build_features(memory);
    const auto& cfg = memory.config();
    const auto n = static_cast<int>(memory.size());

    ClusteringReport report;
    ClusterModel model;
    if (cfg.k_mode.automatic && n - 1 < cfg.k_mode.k_min) {
        // too few edits to compare candidate K values
        model = cluster_best_of(features, std::min(n, cfg.k_mode.k_min), params_from(cfg), cfg.seed, backend);
    } else if (cfg.k_mode.automatic) {
        KSelectionConfig kc;
        kc.k_min = cfg.k_mode.k_min;
        kc.k_max = std::min(cfg.k_mode.k_max, n - 1);
        kc.weight_s = cfg.select_weight_s;
        kc.weight_e = cfg.select_weight_e;
        kc.clustering = params_from(cfg);
        auto sel = select_k(features, kc, cfg.seed, backend);
        model = sel.best;
        report.selection = std::move(sel);
    } else {
        EDITMEM_REQUIRE(cfg.k_mode.fixed_k <= n, ErrorKind::kInvalidArgument,
                        "cluster_memory: K=" + std::to_string(cfg.k_mode.fixed_k) + " exceeds N=" + std::to_string(n));
        model = cluster_best_of(features, cfg.k_mode.fixed_k, params_from(cfg), cfg.seed, backend);
    }

    const int k = model.k();
    std::vector<Cluster> clusters(k);
    for (int c = 0; c < k; ++c) {
        clusters[c].id = c;
        clusters[c].centroid_full = model.centroids.row_copy(c);
        clusters[c].centroid_embed = embedding_block(model.centroids.row(c), memory.dim());
    }
    for (int i = 0; i < n; ++i) {
        clusters[model.assignment[i]].member_ids.push_back(i);
    }
    memory.replace_clusters(std::move(clusters));
    memory.set_silhouettes(model.silhouette_global, model.silhouette_per_cluster);
    memory.set_silhouette_peak(model.silhouette_global);

    report.k = k;
    report.inertia = model.inertia;
    report.silhouette_global = model.silhouette_global;
    for (const auto& c : memory.clusters()) {
        report.cluster_sizes.push_back(c.member_ids.size());
    }
    return report;
}

void
refresh_silhouettes(HierarchicalMemory& memory, kernels::Backend backend) {
    const auto view = assigned_view(memory);
    const int k = static_cast<int>(memory.num_clusters());
    const auto sil = silhouette(view.features, view.assignment, k, backend);
    memory.set_silhouettes(sil.global, sil.per_cluster);
}

void
partial_recluster(HierarchicalMemory& memory, const AdaptationReport& trigger, kernels::Backend backend) {
    EDITMEM_REQUIRE(trigger.any(), ErrorKind::kInvalidArgument, "partial_recluster: no adaptation trigger");
    EDITMEM_REQUIRE(memory.clustered(), ErrorKind::kState, "partial_recluster: memory is not clustered");
    if (trigger.global_drop) {
        cluster_memory(memory, backend);
        return;
    }

    std::vector<ClusterId> bad = trigger.low_clusters;
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());

    memory.recompute_maxima();
    std::vector<Cluster> clusters(memory.clusters().begin(), memory.clusters().end());
    std::vector<EditId> pool;
    for (ClusterId c : bad) {
        EDITMEM_REQUIRE(c >= 0 && static_cast<size_t>(c) < clusters.size(), ErrorKind::kInvalidArgument,
                        "partial_recluster: unknown cluster id");
        pool.insert(pool.end(), clusters[c].member_ids.begin(), clusters[c].member_ids.end());
        clusters[c].member_ids.clear();
    }
    std::sort(pool.begin(), pool.end());

    const auto& cfg = memory.config();
    const int k = static_cast<int>(std::min(bad.size(), pool.size()));
    if (k > 0) {
        std::vector<Vector> rows;
        for (EditId id : pool) {
            rows.push_back(build_feature(memory.edit(id), memory.l_max(), memory.w_max()));
        }
        const Matrix sub = Matrix::from_rows(rows);
        ClusteringParams params = params_from(cfg);
        const auto model = cluster_best_of(sub, k, params, derive_seed(cfg.seed, 0x5EC1u, pool.size()), backend);
        for (size_t i = 0; i < pool.size(); ++i) {
            clusters[bad[model.assignment[i]]].member_ids.push_back(pool[i]);
        }
    }

    // Refresh every centroid against the current maxima.
    for (auto& c : clusters) {
        std::sort(c.member_ids.begin(), c.member_ids.end());
        if (c.member_ids.empty()) {
            continue;
        }
        Vector mean(memory.dim() + 2, 0.0);
        for (EditId id : c.member_ids) {
            const Vector f = build_feature(memory.edit(id), memory.l_max(), memory.w_max());
            for (size_t j = 0; j < f.size(); ++j) {
                mean[j] += f[j];
            }
        }
        for (auto& x : mean) {
            x /= static_cast<double>(c.member_ids.size());
        }
        c.centroid_embed = embedding_block(mean, memory.dim());
        c.centroid_full = std::move(mean);
    }
    memory.replace_clusters(std::move(clusters));
    refresh_silhouettes(memory, backend);
    memory.set_silhouette_peak(std::max(memory.silhouette_peak(), memory.silhouette_global()));
}

}  // namespace editmem
