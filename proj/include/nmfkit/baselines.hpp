#pragma once

#include <string>
#include <utility>

#include "nmfkit/nnls.hpp"

namespace nmfkit {

/// Reference update rules the benchmark compares the SR1 solver against.
enum class BaselineKind {
    multiplicative,
    projected_als,
    projected_gradient,
};

std::string to_string(BaselineKind kind);

/// One round of multiplicative updates: W scales by (V H^T) / (W H H^T),
/// then H scales by (W^T V) / (W^T W H) using the fresh W. Denominators get
/// a 1e-12 stabilizer before dividing.
std::pair<DenseMatrix, DenseMatrix> multiplicative_step(const DenseMatrix& v, const DenseMatrix& w,
                                                        const DenseMatrix& h);

/// Naive clipped alternating least squares: solve the unconstrained normal
/// equations for H, clip at zero, then the same for W. Deliberately not a
/// proper NNLS; it is the weak baseline the benchmark contrasts against.
std::pair<DenseMatrix, DenseMatrix> projected_als_step(const DenseMatrix& v, const DenseMatrix& w,
                                                       const DenseMatrix& h);

/// Plain projected gradient h <- P[h - alpha*grad] with Armijo backtracking;
/// same problem form, stopping test and result contract as nnls_solve.
NnlsResult projected_gradient_nnls(const NnlsProblem& p, std::span<const double> h0,
                                   const SolverConfig& cfg);

} // namespace nmfkit
