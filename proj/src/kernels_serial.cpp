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

#include "editmem/kernels.h"

#include <atomic>

#include "kernel_detail.h"

namespace editmem::kernels {

namespace {
std::atomic<Backend> g_default_backend{Backend::kOpenMP};
}  // namespace

Backend
default_backend() {
    return g_default_backend.load(std::memory_order_relaxed);
}

void
set_default_backend(Backend backend) {
    g_default_backend.store(backend, std::memory_order_relaxed);
}

namespace serial {

void
assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int32_t> assignment,
               std::span<double> dist_sq) {
    for (size_t i = 0; i < points.rows(); ++i) {
        detail::nearest_one(points.row(i), centroids, assignment[i], dist_sq[i]);
    }
}

void
update_min_dist_sq(const Matrix& points, std::span<const double> centroid, std::span<double> dist_sq) {
    for (size_t i = 0; i < points.rows(); ++i) {
        dist_sq[i] = std::min(dist_sq[i], l2_distance_sq(points.row(i), centroid));
    }
}

void
silhouette_scores(const Matrix& points, std::span<const int32_t> assignment, int32_t k, std::span<double> scores) {
    std::vector<double> sums(k);
    std::vector<int64_t> counts(k);
    for (size_t i = 0; i < points.rows(); ++i) {
        scores[i] = detail::silhouette_one(points, assignment, k, i, sums, counts);
    }
}

void
cosine_rows(std::span<const double> query, const Matrix& rows, std::span<double> out) {
    for (size_t i = 0; i < rows.rows(); ++i) {
        out[i] = cosine_or_zero(query, rows.row(i));
    }
}

void
adjudicate_batch(std::span<const double> query, std::span<const CandidateView> candidates, double alpha,
                 double beta, AdjudicationOut out) {
    for (size_t i = 0; i < candidates.size(); ++i) {
        detail::adjudicate_one(query, candidates[i], alpha, beta, out.literal[i], out.inferential[i], out.score[i],
                               out.has_questions[i]);
    }
}

}  // namespace serial
}  // namespace editmem::kernels
