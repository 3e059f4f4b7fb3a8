#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nmfkit/config.hpp"
#include "nmfkit/matrix.hpp"

namespace nmfkit {

/// One nonnegative least-squares instance min 0.5*||W h - v||^2 over h >= 0,
/// held in Gram form: gram = W^T W, linear = W^T v, const_term = 0.5*v^T v.
/// The Gram form lets the NMF driver build W^T W and W^T V once per outer
/// iteration and share them across all column subproblems.
struct NnlsProblem {
    DenseMatrix gram;
    std::vector<double> linear;
    double const_term = 0.0;

    std::size_t size() const { return linear.size(); }

    // Checks square shape, symmetry (1e-12 relative) and nonnegative diagonal.
    void validate() const;
};

NnlsProblem make_nnls_problem(const DenseMatrix& w, std::span<const double> v);

/// Split of variable indices into those pinned at the zero bound for the
/// current iteration (fixed) and the rest (free). Both sets are sorted.
struct ActivePartition {
    std::vector<std::size_t> fixed;
    std::vector<std::size_t> free;
};

/// Inverse-Hessian approximation maintained by symmetric rank-one updates.
struct Sr1State {
    DenseMatrix d_inv;
    std::size_t skip_count = 0;

    static Sr1State identity(std::size_t n) { return {DenseMatrix::identity(n), 0}; }
};

struct NnlsResult {
    std::vector<double> solution;
    double kkt_residual = 0.0; // ||min(h, r)||_inf recomputed at the solution
    std::size_t iterations = 0;
    double objective = 0.0;
    bool converged = false;
};

// Per-iteration hook for tests; spans reference solver-owned storage and are
// only valid during the call.
struct NnlsIterationEvent {
    std::size_t iteration;
    double objective_before;
    double objective_after;
    double alpha;
    const ActivePartition& partition;
    std::span<const double> h_after;
};
using NnlsObserver = std::function<void(const NnlsIterationEvent&)>;

// r = Q h - b, the residual/gradient of the Gram-form objective.
std::vector<double> nnls_gradient(const NnlsProblem& p, std::span<const double> h);

// 0.5*h^T Q h - b^T h + const_term; equals 0.5*||W h - v||^2 exactly.
double nnls_objective(const NnlsProblem& p, std::span<const double> h);

// ||min(h, r)||_inf, the optimality measure driving every stopping test.
double kkt_residual(std::span<const double> h, std::span<const double> r);

/// Variables with h_i in [0, eps_l] and positive gradient are pinned at zero,
/// where eps_l = min(eps, ||h - grad||^2) is recomputed from the inputs.
ActivePartition fixed_set(std::span<const double> h, std::span<const double> grad, double eps);

std::vector<double> project_nonneg(std::span<const double> x);

/// Rank-one inverse-Hessian update. Writes the secant-satisfying correction
/// D += s s^T / (s^T omega) with s = step - D*omega; skips (and counts) the
/// update when the denominator fails the safeguard test
/// |s^T omega| >= safeguard * ||s|| * ||omega||.
Sr1State sr1_update(const Sr1State& state, std::span<const double> step,
                    std::span<const double> grad_diff, double safeguard = 1e-8);

/// Armijo backtracking along the projection arc alpha -> P[h - alpha*direction],
/// starting at alpha = 1 with ratio 0.5, sigma = 1e-4, at most 30 halvings.
/// Returns 0 when no trial achieves sufficient decrease.
double step_size(const NnlsProblem& p, std::span<const double> h, std::span<const double> direction);

/// Active-set SR1 solver. Each iteration partitions the variables, pins the
/// fixed block at zero, scales the free gradient by the matching submatrix of
/// the SR1 inverse-Hessian approximation and line-searches the projection arc.
/// An empty h0 means the zero vector. Uses cfg.maxiter_inner as its budget.
NnlsResult nnls_solve(const NnlsProblem& p, std::span<const double> h0, const SolverConfig& cfg,
                      const NnlsObserver& observer = {});

} // namespace nmfkit
