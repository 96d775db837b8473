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

#include <cstddef>
#include <span>
#include <vector>

namespace editmem {

using Vector = std::vector<double>;

/// Dense row-major matrix. Rows are exposed as spans so kernels never see raw
/// pointer arithmetic.
class Matrix {
 public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix
    from_rows(const std::vector<Vector>& rows);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    std::span<double>
    row(size_t i) {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const double>
    row(size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    Vector
    row_copy(size_t i) const {
        auto r = row(i);
        return {r.begin(), r.end()};
    }

    std::span<const double> data() const { return data_; }

    bool operator==(const Matrix&) const = default;

 private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

double
dot(std::span<const double> a, std::span<const double> b);

double
l2_norm(std::span<const double> a);

double
l2_distance_sq(std::span<const double> a, std::span<const double> b);

/// Cosine similarity clamped to [-1, 1]. Throws on dimension mismatch or a
/// zero vector.
double
cosine(std::span<const double> u, std::span<const double> v);

/// Same as cosine() but returns 0 when either side has zero norm. Used on
/// centroids whose embedding block may cancel out.
double
cosine_or_zero(std::span<const double> u, std::span<const double> v);

/// Scales `v` to unit L2 norm in place. Returns false (leaving v untouched)
/// when the norm is zero.
bool
normalize(std::span<double> v);

bool
is_unit_norm(std::span<const double> v, double tol = 1e-6);

}  // namespace editmem
