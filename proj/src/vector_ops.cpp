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

#include "editmem/vector_ops.h"

#include <algorithm>
#include <cmath>

#include "editmem/error.h"

namespace editmem {

Matrix
Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) {
        return {};
    }
    Matrix m(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i) {
        EDITMEM_REQUIRE(rows[i].size() == m.cols(), ErrorKind::kInvalidArgument, "ragged rows in Matrix::from_rows");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

double
dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double
l2_norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

double
l2_distance_sq(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double
cosine(std::span<const double> u, std::span<const double> v) {
    EDITMEM_REQUIRE(u.size() == v.size(), ErrorKind::kInvalidArgument, "cosine: dimension mismatch");
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    EDITMEM_REQUIRE(nu > 0.0 && nv > 0.0, ErrorKind::kInvalidArgument, "cosine: zero vector");
    return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

double
cosine_or_zero(std::span<const double> u, std::span<const double> v) {
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

bool
normalize(std::span<double> v) {
    const double n = l2_norm(v);
    if (n == 0.0) {
        return false;
    }
    for (auto& x : v) {
        x /= n;
    }
    return true;
}

bool
is_unit_norm(std::span<const double> v, double tol) {
    return std::abs(l2_norm(v) - 1.0) <= tol;
}

}  // namespace editmem
