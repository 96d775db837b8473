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

// Data-parallel inner loops of the engine.
//
// Every kernel has a serial reference implementation (namespace `serial`) and
// an OpenMP implementation (namespace `omp`) with the same signature. The two
// must agree bit-for-bit: each output element is computed by the same
// sequence of floating-point operations, and any reduction across elements
// is done serially after the parallel map. tests/kernels_test.cpp holds them
// to that.

#include <cstdint>
#include <span>
#include <vector>

#include "editmem/vector_ops.h"

namespace editmem::kernels {

enum class Backend { kSerial, kOpenMP };

/// Backend used by engine code when the caller does not choose one.
Backend
default_backend();
void
set_default_backend(Backend backend);

/// One adjudication candidate: the edit's embedding plus the embeddings of its
/// hypothetical questions (possibly none).
struct CandidateView {
    std::span<const double> embedding;
    const std::vector<Vector>* questions = nullptr;
};

struct AdjudicationOut {
    std::span<double> literal;
    std::span<double> inferential;
    std::span<double> score;
    std::span<uint8_t> has_questions;
};

namespace serial {
// nearest centroid by squared Euclidean distance; ties go to the lowest centroid index
void
assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int32_t> assignment,
               std::span<double> dist_sq);

// dist_sq[i] = min(dist_sq[i], |points[i] - centroid|^2)
void
update_min_dist_sq(const Matrix& points, std::span<const double> centroid, std::span<double> dist_sq);

// per-point silhouette with Euclidean distance; singletons and a(i) = b(i) = 0 score 0
void
silhouette_scores(const Matrix& points, std::span<const int32_t> assignment, int32_t k, std::span<double> scores);

// out[i] = cosine_or_zero(query, rows[i])
void
cosine_rows(std::span<const double> query, const Matrix& rows, std::span<double> out);

// literal and max-pooled inferential evidence plus their weighted sum, per candidate
void
adjudicate_batch(std::span<const double> query, std::span<const CandidateView> candidates, double alpha,
                 double beta, AdjudicationOut out);
}  // namespace serial

// Same contracts as serial::, parallelised over the outer loop.
namespace omp {
void
assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int32_t> assignment,
               std::span<double> dist_sq);

void
update_min_dist_sq(const Matrix& points, std::span<const double> centroid, std::span<double> dist_sq);

void
silhouette_scores(const Matrix& points, std::span<const int32_t> assignment, int32_t k, std::span<double> scores);

void
cosine_rows(std::span<const double> query, const Matrix& rows, std::span<double> out);

void
adjudicate_batch(std::span<const double> query, std::span<const CandidateView> candidates, double alpha,
                 double beta, AdjudicationOut out);
}  // namespace omp

// Dispatchers.

inline void
assign_nearest(Backend b, const Matrix& points, const Matrix& centroids, std::span<int32_t> assignment,
               std::span<double> dist_sq) {
    b == Backend::kOpenMP ? omp::assign_nearest(points, centroids, assignment, dist_sq)
                          : serial::assign_nearest(points, centroids, assignment, dist_sq);
}

inline void
update_min_dist_sq(Backend b, const Matrix& points, std::span<const double> centroid, std::span<double> dist_sq) {
    b == Backend::kOpenMP ? omp::update_min_dist_sq(points, centroid, dist_sq)
                          : serial::update_min_dist_sq(points, centroid, dist_sq);
}

inline void
silhouette_scores(Backend b, const Matrix& points, std::span<const int32_t> assignment, int32_t k,
                  std::span<double> scores) {
    b == Backend::kOpenMP ? omp::silhouette_scores(points, assignment, k, scores)
                          : serial::silhouette_scores(points, assignment, k, scores);
}

inline void
cosine_rows(Backend b, std::span<const double> query, const Matrix& rows, std::span<double> out) {
    b == Backend::kOpenMP ? omp::cosine_rows(query, rows, out) : serial::cosine_rows(query, rows, out);
}

inline void
adjudicate_batch(Backend b, std::span<const double> query, std::span<const CandidateView> candidates, double alpha,
                 double beta, AdjudicationOut out) {
    b == Backend::kOpenMP ? omp::adjudicate_batch(query, candidates, alpha, beta, out)
                          : serial::adjudicate_batch(query, candidates, alpha, beta, out);
}

}  // namespace editmem::kernels
