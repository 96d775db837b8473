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

// Per-element bodies shared by the serial and OpenMP kernels, so both paths
// run the identical floating-point sequence for every output element.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "editmem/kernels.h"
#include "editmem/vector_ops.h"

namespace editmem::kernels::detail {

inline void
nearest_one(std::span<const double> point, const Matrix& centroids, int32_t& best, double& best_d) {
    best = 0;
    best_d = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centroids.rows(); ++c) {
        const double d = l2_distance_sq(point, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int32_t>(c);
        }
    }
}

// `sums` and `counts` are scratch buffers of size k.
inline double
silhouette_one(const Matrix& points, std::span<const int32_t> assignment, int32_t k, size_t i,
               std::vector<double>& sums, std::vector<int64_t>& counts) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    const auto pi = points.row(i);
    for (size_t j = 0; j < points.rows(); ++j) {
        if (j == i) {
            continue;
        }
        const int32_t c = assignment[j];
        sums[c] += std::sqrt(l2_distance_sq(pi, points.row(j)));
        counts[c] += 1;
    }
    const int32_t own = assignment[i];
    if (counts[own] == 0) {
        return 0.0;  // singleton
    }
    const double a = sums[own] / static_cast<double>(counts[own]);
    double b = std::numeric_limits<double>::infinity();
    for (int32_t c = 0; c < k; ++c) {
        if (c != own && counts[c] > 0) {
            b = std::min(b, sums[c] / static_cast<double>(counts[c]));
        }
    }
    if (!std::isfinite(b)) {
        return 0.0;  // no other non-empty cluster
    }
    const double denom = std::max(a, b);
    if (denom == 0.0) {
        return 0.0;
    }
    return (b - a) / denom;
}

inline void
adjudicate_one(std::span<const double> query, const CandidateView& cand, double alpha, double beta,
               double& literal, double& inferential, double& score, uint8_t& has_questions) {
    literal = cosine_or_zero(query, cand.embedding);
    inferential = 0.0;
    has_questions = 0;
    if (cand.questions != nullptr && !cand.questions->empty()) {
        has_questions = 1;
        inferential = -std::numeric_limits<double>::infinity();
        for (const auto& h : *cand.questions) {
            inferential = std::max(inferential, cosine_or_zero(query, h));
        }
    }
    score = alpha * literal + beta * inferential;
}

}  // namespace editmem::kernels::detail
