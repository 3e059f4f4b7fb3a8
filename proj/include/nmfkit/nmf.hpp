#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmfkit/baselines.hpp"
#include "nmfkit/config.hpp"
#include "nmfkit/matrix.hpp"

namespace nmfkit {

/// Factor pair approximating V as W*H with everything entrywise nonnegative.
struct NmfModel {
    DenseMatrix w; // n x k
    DenseMatrix h; // k x m
    std::size_t rank = 0;
};

/// One row of the convergence record emitted per outer iteration.
struct IterationTrace {
    std::size_t iteration = 0;
    double objective = 0.0;      // 0.5*||V - WH||_F^2
    double relative_error = 0.0; // ||V - WH||_F / ||V||_F
    double kkt_residual_h = 0.0;
    double kkt_residual_w = 0.0;
    double elapsed_ms = 0.0;
};

enum class Method {
    sr1,
    multiplicative,
    projected_als,
    projected_gradient,
};

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct NmfRun {
    NmfModel model;
    std::vector<IterationTrace> trace;
};

// Gradient of 0.5*||V - WH||_F^2 in H: W^T W H - W^T V.
DenseMatrix grad_h(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h);

// Gradient in W: W H H^T - V H^T.
DenseMatrix grad_w(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h);

/// Solves min_{H >= 0} 0.5*||V - W H||_F^2 one column at a time with the SR1
/// solver, sharing the Gram pair (W^T W, W^T V) across columns and warm
/// starting each column from h_init.
DenseMatrix solve_h_subproblem(const DenseMatrix& v, const DenseMatrix& w,
                               const DenseMatrix& h_init, const SolverConfig& cfg);

/// Mirror of the H subproblem: rows of W are solved as columns of W^T against
/// the Grams (H H^T, H V^T).
DenseMatrix solve_w_subproblem(const DenseMatrix& v, const DenseMatrix& h,
                               const DenseMatrix& w_init, const SolverConfig& cfg);

/// Alternating driver: H step then W step per outer iteration (the one-shot
/// multiplicative and clipped-ALS rules apply their own internal order).
/// Stops on maxiter_outer, both KKT residuals within cfg.kkt_tol, or a
/// relative objective change below cfg.rel_change_tol. max_seconds > 0 adds a
/// wall-clock cap checked once per outer iteration.
NmfRun nmf_solve(const DenseMatrix& v, std::size_t k, const DenseMatrix& w0, const DenseMatrix& h0,
                 Method method, const SolverConfig& cfg, double max_seconds = 0.0);

// ||V - WH||_F / ||V||_F; rejects zero-norm V.
double relative_error(const DenseMatrix& v, const NmfModel& model);

/// Random starting factors with entries uniform on (0, 1]; strictly positive
/// so no variable starts on the boundary. W is drawn first, then H, both in
/// row-major order, so a seed pins the whole starting point.
NmfModel make_random_model(std::size_t n, std::size_t m, std::size_t k, std::int64_t seed);

} // namespace nmfkit
