#pragma once

// Shared helpers for the test binaries: deterministic instance generators and
// a small independent eigensolver used as a rank oracle. Everything here is
// test-only and deliberately naive.

#include <algorithm>
#include <cmath>
#include <vector>

#include "nmfkit/matrix.hpp"
#include "nmfkit/nnls.hpp"
#include "nmfkit/rng.hpp"

namespace testsupport {

inline nmfkit::DenseMatrix random_matrix(nmfkit::Rng& rng, std::size_t rows, std::size_t cols,
                                         double lo = 0.0, double hi = 1.0) {
    nmfkit::DenseMatrix m(rows, cols);
    for (double& x : m.data()) x = rng.uniform(lo, hi);
    return m;
}

// A^T A + I: symmetric positive definite by construction.
inline nmfkit::DenseMatrix random_spd(nmfkit::Rng& rng, std::size_t n) {
    const nmfkit::DenseMatrix a = random_matrix(rng, n, n, -1.0, 1.0);
    nmfkit::DenseMatrix q = nmfkit::matmul(nmfkit::transpose(a), a);
    for (std::size_t i = 0; i < n; ++i) q(i, i) += 1.0;
    // symmetrize exactly so rounding cannot break problem validation
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) q(j, i) = q(i, j);
    return q;
}

struct RawNnlsInstance {
    nmfkit::DenseMatrix w;
    std::vector<double> v;
    nmfkit::NnlsProblem problem;
};

// Random nonnegative W (a few more rows than columns, so the Gram is almost
// surely positive definite) with a mixed-sign right-hand side.
inline RawNnlsInstance random_nnls_instance(nmfkit::Rng& rng, std::size_t dim,
                                            std::size_t extra_rows = 5) {
    RawNnlsInstance inst;
    inst.w = random_matrix(rng, dim + extra_rows, dim);
    inst.v.resize(dim + extra_rows);
    for (double& x : inst.v) x = rng.uniform(-1.0, 1.0);
    inst.problem = nmfkit::make_nnls_problem(inst.w, inst.v);
    return inst;
}

// Numerical rank via column-pivoted modified Gram-Schmidt: count residual
// column norms above tol times the largest initial norm. Independent of the
// library's solvers.
inline std::size_t numerical_rank(const nmfkit::DenseMatrix& a, double tol = 1e-10) {
    const std::size_t rows = a.rows(), cols = a.cols();
    std::vector<std::vector<double>> col(cols);
    for (std::size_t j = 0; j < cols; ++j) col[j] = a.column(j);

    double scale = 0.0;
    for (const auto& c : col) scale = std::max(scale, nmfkit::norm2(c));
    if (scale == 0.0) return 0;

    std::size_t rank = 0;
    std::vector<bool> used(cols, false);
    for (std::size_t step = 0; step < cols; ++step) {
        std::size_t pivot = cols;
        double best = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            if (used[j]) continue;
            const double nrm = nmfkit::norm2(col[j]);
            if (nrm > best) {
                best = nrm;
                pivot = j;
            }
        }
        if (pivot == cols || best <= tol * scale) break;
        ++rank;
        used[pivot] = true;
        for (double& x : col[pivot]) x /= best;
        for (std::size_t j = 0; j < cols; ++j) {
            if (used[j]) continue;
            const double proj = nmfkit::dot(col[j], col[pivot]);
            for (std::size_t i = 0; i < rows; ++i) col[j][i] -= proj * col[pivot][i];
        }
    }
    return rank;
}

} // namespace testsupport
