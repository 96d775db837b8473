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
#include "kernel_detail.h"

namespace editmem::kernels::omp {

namespace {
// Below this many rows the fork/join overhead dominates.
constexpr int64_t kMinParallelRows = 64;
}  // namespace

void
assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int32_t> assignment,
               std::span<double> dist_sq) {
    const auto n = static_cast<int64_t>(points.rows());
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
    for (int64_t i = 0; i < n; ++i) {
        detail::nearest_one(points.row(i), centroids, assignment[i], dist_sq[i]);
    }
}

void
update_min_dist_sq(const Matrix& points, std::span<const double> centroid, std::span<double> dist_sq) {
    const auto n = static_cast<int64_t>(points.rows());
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
    for (int64_t i = 0; i < n; ++i) {
        dist_sq[i] = std::min(dist_sq[i], l2_distance_sq(points.row(i), centroid));
    }
}

void
silhouette_scores(const Matrix& points, std::span<const int32_t> assignment, int32_t k, std::span<double> scores) {
    const auto n = static_cast<int64_t>(points.rows());
#pragma omp parallel if (n >= kMinParallelRows)
    {
        std::vector<double> sums(k);
        std::vector<int64_t> counts(k);
#pragma omp for schedule(dynamic, 16)
        for (int64_t i = 0; i < n; ++i) {
            scores[i] = detail::silhouette_one(points, assignment, k, static_cast<size_t>(i), sums, counts);
        }
    }
}

void
cosine_rows(std::span<const double> query, const Matrix& rows, std::span<double> out) {
    const auto n = static_cast<int64_t>(rows.rows());
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
    for (int64_t i = 0; i < n; ++i) {
        out[i] = cosine_or_zero(query, rows.row(i));
    }
}

void
adjudicate_batch(std::span<const double> query, std::span<const CandidateView> candidates, double alpha,
                 double beta, AdjudicationOut out) {
    const auto n = static_cast<int64_t>(candidates.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
    for (int64_t i = 0; i < n; ++i) {
        detail::adjudicate_one(query, candidates[i], alpha, beta, out.literal[i], out.inferential[i], out.score[i],
                               out.has_questions[i]);
    }
}

}  // namespace editmem::kernels::omp
