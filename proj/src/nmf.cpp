#include "nmfkit/nmf.hpp"

#include <chrono>
#include <cmath>

#include "nmfkit/errors.hpp"
#include "nmfkit/nnls.hpp"
#include "nmfkit/rng.hpp"

namespace nmfkit {

namespace {

enum class InnerSolver { sr1, projected_gradient };

void check_subproblem_shapes(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
    if (w.rows() != v.rows() || h.cols() != v.cols() || w.cols() != h.rows()) {
        throw ShapeError("nmf subproblem: incompatible shapes");
    }
}

DenseMatrix solve_columns(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h_init,
                          const SolverConfig& cfg, InnerSolver inner) {
    check_subproblem_shapes(v, w, h_init);
    if (!h_init.all_nonnegative()) {
        throw ValidationError("nmf subproblem: warm start must be nonnegative");
    }
    const std::size_t k = w.cols(), m = v.cols();
    const DenseMatrix wt = transpose(w);
    const DenseMatrix gram = matmul(wt, w); // shared across every column
    const DenseMatrix rhs = matmul(wt, v);

    DenseMatrix out(k, m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::vector<double> vcol = v.column(j);
        NnlsProblem p{gram, rhs.column(j), 0.5 * dot(vcol, vcol)};
        const std::vector<double> h0 = h_init.column(j);
        try {
            const NnlsResult res = inner == InnerSolver::sr1
                                       ? nnls_solve(p, h0, cfg)
                                       : projected_gradient_nnls(p, h0, cfg);
            out.set_column(j, res.solution);
        } catch (const NumericalError& e) {
            throw NumericalError("column " + std::to_string(j) + ": " + e.what(), e.iteration());
        }
    }
    return out;
}

DenseMatrix solve_rows_of_w(const DenseMatrix& v, const DenseMatrix& h, const DenseMatrix& w_init,
                            const SolverConfig& cfg, InnerSolver inner) {
    // exact mirror: rows of W are the columns of W^T in the transposed problem
    return transpose(solve_columns(transpose(v), transpose(h), transpose(w_init), cfg, inner));
}

double matrix_kkt_residual(const DenseMatrix& x, const DenseMatrix& grad) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        m = std::max(m, std::abs(std::min(x.data()[i], grad.data()[i])));
    }
    return m;
}

} // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::sr1: return "sr1";
        case Method::multiplicative: return "multiplicative";
        case Method::projected_als: return "projected_als";
        case Method::projected_gradient: return "projected_gradient";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "sr1") return Method::sr1;
    if (name == "multiplicative") return Method::multiplicative;
    if (name == "projected_als") return Method::projected_als;
    if (name == "projected_gradient") return Method::projected_gradient;
    throw ValidationError("unknown method '" + name +
                          "' (expected sr1, multiplicative, projected_als or projected_gradient)");
}

DenseMatrix grad_h(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
    check_subproblem_shapes(v, w, h);
    const DenseMatrix wt = transpose(w);
    return subtract(matmul(matmul(wt, w), h), matmul(wt, v));
}

DenseMatrix grad_w(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
    check_subproblem_shapes(v, w, h);
    const DenseMatrix ht = transpose(h);
    return subtract(matmul(w, matmul(h, ht)), matmul(v, ht));
}

DenseMatrix solve_h_subproblem(const DenseMatrix& v, const DenseMatrix& w,
                               const DenseMatrix& h_init, const SolverConfig& cfg) {
    return solve_columns(v, w, h_init, cfg, InnerSolver::sr1);
}

DenseMatrix solve_w_subproblem(const DenseMatrix& v, const DenseMatrix& h,
                               const DenseMatrix& w_init, const SolverConfig& cfg) {
    return solve_rows_of_w(v, h, w_init, cfg, InnerSolver::sr1);
}

NmfRun nmf_solve(const DenseMatrix& v, std::size_t k, const DenseMatrix& w0, const DenseMatrix& h0,
                 Method method, const SolverConfig& cfg, double max_seconds) {
    cfg.validate();
    const std::size_t n = v.rows(), m = v.cols();
    if (!v.all_nonnegative()) throw ValidationError("nmf_solve: V must be entrywise nonnegative");
    if (k < 1 || k > std::min(n, m)) {
        throw ValidationError("nmf_solve: rank must satisfy 1 <= k <= min(n, m)");
    }
    if (w0.rows() != n || w0.cols() != k || h0.rows() != k || h0.cols() != m) {
        throw ValidationError("nmf_solve: starting factors have wrong shapes");
    }
    if (!w0.all_nonnegative() || !h0.all_nonnegative()) {
        throw ValidationError("nmf_solve: starting factors must be nonnegative");
    }

    const double v_norm = frobenius_norm(v);
    const auto start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    };

    NmfRun run;
    run.model = {w0, h0, k};
    DenseMatrix& w = run.model.w;
    DenseMatrix& h = run.model.h;

    double prev_obj;
    {
        const DenseMatrix e = subtract(v, matmul(w, h));
        prev_obj = 0.5 * frobenius_norm(e) * frobenius_norm(e);
    }

    for (std::size_t l = 1; l <= cfg.maxiter_outer; ++l) {
        switch (method) {
            case Method::multiplicative: {
                auto [wn, hn] = multiplicative_step(v, w, h);
                w = std::move(wn);
                h = std::move(hn);
                break;
            }
            case Method::projected_als: {
                auto [wn, hn] = projected_als_step(v, w, h);
                w = std::move(wn);
                h = std::move(hn);
                break;
            }
            case Method::sr1:
            case Method::projected_gradient: {
                const InnerSolver inner = method == Method::sr1 ? InnerSolver::sr1
                                                                : InnerSolver::projected_gradient;
                h = solve_columns(v, w, h, cfg, inner);
                w = solve_rows_of_w(v, h, w, cfg, inner);
                break;
            }
        }

        const double err_norm = frobenius_norm(subtract(v, matmul(w, h)));
        const double obj = 0.5 * err_norm * err_norm;
        if (!std::isfinite(obj)) {
            throw NumericalError("nmf_solve: non-finite objective", static_cast<long>(l));
        }
        IterationTrace rec;
        rec.iteration = l;
        rec.objective = obj;
        rec.relative_error = v_norm > 0.0 ? err_norm / v_norm : 0.0;
        rec.kkt_residual_h = matrix_kkt_residual(h, grad_h(v, w, h));
        rec.kkt_residual_w = matrix_kkt_residual(w, grad_w(v, w, h));
        rec.elapsed_ms = elapsed_ms();
        run.trace.push_back(rec);

        if (rec.kkt_residual_h <= cfg.kkt_tol && rec.kkt_residual_w <= cfg.kkt_tol) break;
        if (std::abs(prev_obj - obj) <= cfg.rel_change_tol * std::max(1.0, prev_obj)) break;
        if (max_seconds > 0.0 && rec.elapsed_ms >= 1000.0 * max_seconds) break;
        prev_obj = obj;
    }
    return run;
}

double relative_error(const DenseMatrix& v, const NmfModel& model) {
    const double v_norm = frobenius_norm(v);
    if (!(v_norm > 0.0)) throw ValidationError("relative_error: ||V||_F must be positive");
    return frobenius_norm(subtract(v, matmul(model.w, model.h))) / v_norm;
}

NmfModel make_random_model(std::size_t n, std::size_t m, std::size_t k, std::int64_t seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    NmfModel model{DenseMatrix(n, k), DenseMatrix(k, m), k};
    for (double& x : model.w.data()) x = rng.uniform_pos();
    for (double& x : model.h.data()) x = rng.uniform_pos();
    return model;
}

} // namespace nmfkit
