#include "nmfkit/baselines.hpp"

#include <cmath>

#include "nmfkit/errors.hpp"

namespace nmfkit {

namespace {

constexpr double kDenomStabilizer = 1e-12;

void check_factor_shapes(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
    if (w.rows() != v.rows() || h.cols() != v.cols() || w.cols() != h.rows()) {
        throw ShapeError("baseline step: V is " + std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()) + ", W " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", H " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()));
    }
}

} // namespace

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::multiplicative: return "multiplicative";
        case BaselineKind::projected_als: return "projected_als";
        case BaselineKind::projected_gradient: return "projected_gradient";
    }
    return "unknown";
}

std::pair<DenseMatrix, DenseMatrix> multiplicative_step(const DenseMatrix& v, const DenseMatrix& w,
                                                        const DenseMatrix& h) {
    check_factor_shapes(v, w, h);

    // W update from the current H
    DenseMatrix w_next = w;
    {
        const DenseMatrix ht = transpose(h);
        const DenseMatrix num = matmul(v, ht);           // V H^T
        const DenseMatrix den = matmul(w, matmul(h, ht)); // W H H^T
        for (std::size_t i = 0; i < w_next.size(); ++i) {
            w_next.data()[i] = w.data()[i] * num.data()[i] / (den.data()[i] + kDenomStabilizer);
        }
    }
    // H update from the updated W
    DenseMatrix h_next = h;
    {
        const DenseMatrix wt = transpose(w_next);
        const DenseMatrix num = matmul(wt, v);            // W^T V
        const DenseMatrix den = matmul(matmul(wt, w_next), h); // W^T W H
        for (std::size_t i = 0; i < h_next.size(); ++i) {
            h_next.data()[i] = h.data()[i] * num.data()[i] / (den.data()[i] + kDenomStabilizer);
        }
    }
    return {std::move(w_next), std::move(h_next)};
}

std::pair<DenseMatrix, DenseMatrix> projected_als_step(const DenseMatrix& v, const DenseMatrix& w,
                                                       const DenseMatrix& h) {
    check_factor_shapes(v, w, h);
    const std::size_t k = w.cols();

    // H <- P[ (W^T W)^{-1} W^T V ], column by column
    DenseMatrix h_next(k, v.cols());
    {
        const DenseMatrix wt = transpose(w);
        const DenseMatrix gram = matmul(wt, w);
        const DenseMatrix rhs = matmul(wt, v);
        for (std::size_t j = 0; j < v.cols(); ++j) {
            const std::vector<double> x = solve_spd(gram, rhs.column(j));
            for (std::size_t i = 0; i < k; ++i) h_next(i, j) = std::max(x[i], 0.0);
        }
    }
    // W <- P[ solve(H H^T, H V^T) ]^T, row by row
    DenseMatrix w_next(v.rows(), k);
    {
        const DenseMatrix ht = transpose(h_next);
        const DenseMatrix gram = matmul(h_next, ht);
        const DenseMatrix rhs = matmul(h_next, transpose(v));
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const std::vector<double> x = solve_spd(gram, rhs.column(i));
            for (std::size_t j = 0; j < k; ++j) w_next(i, j) = std::max(x[j], 0.0);
        }
    }
    return {std::move(w_next), std::move(h_next)};
}

NnlsResult projected_gradient_nnls(const NnlsProblem& p, std::span<const double> h0,
                                   const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    const std::size_t k = p.size();

    std::vector<double> h;
    if (h0.empty()) {
        h.assign(k, 0.0);
    } else {
        if (h0.size() != k) throw ShapeError("projected_gradient_nnls: h0 has wrong length");
        h.assign(h0.begin(), h0.end());
        for (double v : h) {
            if (!(v >= 0.0)) throw ValidationError("projected_gradient_nnls: h0 must be nonnegative");
        }
    }

    std::vector<double> r = nnls_gradient(p, h);
    double kkt = kkt_residual(h, r);
    bool converged = false;
    std::size_t iter = 1;
    for (; iter <= cfg.maxiter_inner; ++iter) {
        if (!std::isfinite(nnls_objective(p, h))) {
            throw NumericalError("projected_gradient_nnls: non-finite objective",
                                 static_cast<long>(iter));
        }
        kkt = kkt_residual(h, r);
        if (kkt <= cfg.kkt_tol) {
            converged = true;
            break;
        }
        const double alpha = step_size(p, h, r);
        if (alpha == 0.0) break; // numerical floor; no decreasing step exists
        for (std::size_t i = 0; i < k; ++i) h[i] = std::max(h[i] - alpha * r[i], 0.0);
        r = nnls_gradient(p, h);
    }

    if (!converged) {
        iter = std::min(iter, cfg.maxiter_inner);
        r = nnls_gradient(p, h);
        kkt = kkt_residual(h, r);
        converged = kkt <= cfg.kkt_tol;
    }

    NnlsResult result;
    result.solution = std::move(h);
    result.kkt_residual = kkt;
    result.iterations = iter;
    result.objective = nnls_objective(p, result.solution);
    result.converged = converged;
    return result;
}

} // namespace nmfkit
