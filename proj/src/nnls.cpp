#include "nmfkit/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmfkit/errors.hpp"

namespace nmfkit {

namespace {

constexpr double kArmijoSigma = 1e-4;
constexpr double kBacktrackRatio = 0.5;
constexpr int kMaxHalvings = 30;
constexpr double kDescentTol = 1e-12;
constexpr double kSr1Safeguard = 1e-8;

struct ArcSearchResult {
    double alpha = 0.0;
    std::vector<double> point;
    double objective = 0.0;
};

// Armijo backtracking over an arbitrary trial builder. Accepts the first
// alpha with predicted decrease pred = grad_ref.(trial - h_ref) < 0 and
// g(trial) <= g_ref + sigma * pred; alpha = 0 and the reference point when
// every trial fails.
template <typename TrialFn>
ArcSearchResult backtrack_arc(const NnlsProblem& p, std::span<const double> h_ref, double g_ref,
                              std::span<const double> grad_ref, const TrialFn& make_trial) {
    double alpha = 1.0;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, alpha *= kBacktrackRatio) {
        std::vector<double> trial = make_trial(alpha);
        double pred = 0.0;
        for (std::size_t i = 0; i < trial.size(); ++i) pred += grad_ref[i] * (trial[i] - h_ref[i]);
        if (!(pred < 0.0)) continue;
        const double g_trial = nnls_objective(p, trial);
        if (g_trial <= g_ref + kArmijoSigma * pred) {
            return {alpha, std::move(trial), g_trial};
        }
    }
    return {0.0, std::vector<double>(h_ref.begin(), h_ref.end()), g_ref};
}

} // namespace

void NnlsProblem::validate() const {
    const std::size_t k = linear.size();
    if (gram.rows() != k || gram.cols() != k) {
        throw ShapeError("nnls problem: gram is " + std::to_string(gram.rows()) + "x" +
                         std::to_string(gram.cols()) + " but linear term has length " +
                         std::to_string(k));
    }
    double scale = 1.0;
    for (double v : gram.data()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < k; ++i) {
        if (gram(i, i) < 0.0) throw ValidationError("nnls problem: gram diagonal is negative");
        for (std::size_t j = i + 1; j < k; ++j) {
            if (std::abs(gram(i, j) - gram(j, i)) > 1e-12 * scale) {
                throw ValidationError("nnls problem: gram is not symmetric");
            }
        }
    }
}

NnlsProblem make_nnls_problem(const DenseMatrix& w, std::span<const double> v) {
    if (w.rows() != v.size()) {
        throw ShapeError("nnls problem: w has " + std::to_string(w.rows()) + " rows, v length " +
                         std::to_string(v.size()));
    }
    const std::size_t k = w.cols();
    NnlsProblem p;
    p.gram = DenseMatrix(k, k);
    // W^T W, symmetrized by construction
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < w.rows(); ++a) s += w(a, i) * w(a, j);
            p.gram(i, j) = s;
            p.gram(j, i) = s;
        }
    }
    p.linear.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < w.rows(); ++a) s += w(a, i) * v[a];
        p.linear[i] = s;
    }
    p.const_term = 0.5 * dot(v, v);
    return p;
}

std::vector<double> nnls_gradient(const NnlsProblem& p, std::span<const double> h) {
    const std::size_t k = p.size();
    if (h.size() != k) throw ShapeError("nnls_gradient: h has wrong length");
    std::vector<double> r(k);
    for (std::size_t i = 0; i < k; ++i) r[i] = dot(p.gram.row(i), h) - p.linear[i];
    return r;
}

double nnls_objective(const NnlsProblem& p, std::span<const double> h) {
    const std::size_t k = p.size();
    if (h.size() != k) throw ShapeError("nnls_objective: h has wrong length");
    double quad = 0.0;
    for (std::size_t i = 0; i < k; ++i) quad += h[i] * dot(p.gram.row(i), h);
    return 0.5 * quad - dot(p.linear, h) + p.const_term;
}

double kkt_residual(std::span<const double> h, std::span<const double> r) {
    double m = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) m = std::max(m, std::abs(std::min(h[i], r[i])));
    return m;
}

ActivePartition fixed_set(std::span<const double> h, std::span<const double> grad, double eps) {
    if (h.size() != grad.size()) throw ShapeError("fixed_set: length mismatch");
    if (!(eps > 0.0)) throw ValidationError("fixed_set: eps must be positive");
    double diff_sq = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double d = h[i] - grad[i];
        diff_sq += d * d;
    }
    const double eps_l = std::min(eps, diff_sq);
    ActivePartition part;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] >= 0.0 && h[i] <= eps_l && grad[i] > 0.0) {
            part.fixed.push_back(i);
        } else {
            part.free.push_back(i);
        }
    }
    return part;
}

std::vector<double> project_nonneg(std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], 0.0);
    return y;
}

Sr1State sr1_update(const Sr1State& state, std::span<const double> step,
                    std::span<const double> grad_diff, double safeguard) {
    const std::size_t k = state.d_inv.rows();
    if (step.size() != k || grad_diff.size() != k) throw ShapeError("sr1_update: length mismatch");
    if (!(safeguard > 0.0) || !(safeguard < 1.0)) {
        throw ValidationError("sr1_update: safeguard must be in (0,1)");
    }
    // s = v - D*omega
    std::vector<double> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = step[i] - dot(state.d_inv.row(i), grad_diff);
    const double den = dot(s, grad_diff);
    if (!(std::abs(den) > 0.0) || std::abs(den) < safeguard * norm2(s) * norm2(grad_diff)) {
        Sr1State skipped = state;
        ++skipped.skip_count;
        return skipped;
    }
    Sr1State next = state;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) next.d_inv(i, j) += s[i] * s[j] / den;
    }
    return next;
}

double step_size(const NnlsProblem& p, std::span<const double> h, std::span<const double> direction) {
    if (direction.size() != h.size()) throw ShapeError("step_size: length mismatch");
    const double g_ref = nnls_objective(p, h);
    const std::vector<double> grad = nnls_gradient(p, h);
    auto make_trial = [&](double alpha) {
        std::vector<double> t(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) t[i] = std::max(h[i] - alpha * direction[i], 0.0);
        return t;
    };
    return backtrack_arc(p, h, g_ref, grad, make_trial).alpha;
}

NnlsResult nnls_solve(const NnlsProblem& p, std::span<const double> h0, const SolverConfig& cfg,
                      const NnlsObserver& observer) {
    p.validate();
    cfg.validate();
    const std::size_t k = p.size();

    std::vector<double> h;
    if (h0.empty()) {
        h.assign(k, 0.0);
    } else {
        if (h0.size() != k) throw ShapeError("nnls_solve: h0 has wrong length");
        h.assign(h0.begin(), h0.end());
        for (double v : h) {
            if (!(v >= 0.0)) throw ValidationError("nnls_solve: h0 must be nonnegative");
        }
    }

    Sr1State state = Sr1State::identity(k);
    std::vector<double> r = nnls_gradient(p, h);
    double g = nnls_objective(p, h);
    double kkt = kkt_residual(h, r);
    bool converged = false;
    std::size_t iter = 1;

    for (; iter <= cfg.maxiter_inner; ++iter) {
        if (!std::isfinite(g)) {
            throw NumericalError("nnls_solve: non-finite objective", static_cast<long>(iter));
        }
        kkt = kkt_residual(h, r);
        if (kkt <= cfg.kkt_tol) {
            converged = true;
            break;
        }

        ActivePartition part = fixed_set(h, r, cfg.eps_active);
        const std::size_t nf = part.free.size();

        // scaled direction on the free block: d = Dbar * r_free with Dbar the
        // free-index principal submatrix of the inverse-Hessian approximation
        std::vector<double> r_free(nf);
        for (std::size_t a = 0; a < nf; ++a) r_free[a] = r[part.free[a]];
        std::vector<double> d(nf, 0.0);
        for (std::size_t a = 0; a < nf; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < nf; ++b) s += state.d_inv(part.free[a], part.free[b]) * r_free[b];
            d[a] = s;
        }
        bool identity_scaling = false;
        if (dot(r_free, d) <= kDescentTol * norm2(r_free) * norm2(d)) {
            // SR1 need not stay positive definite; scale this step by the
            // identity instead (the state keeps collecting curvature)
            d = r_free;
            identity_scaling = true;
        }

        // trial per the partitioned update: free block walks the projection
        // arc, fixed block is pinned at zero
        auto make_trial = [&](double alpha) {
            std::vector<double> t(k, 0.0);
            for (std::size_t a = 0; a < nf; ++a) {
                const std::size_t i = part.free[a];
                t[i] = std::max(h[i] - alpha * d[a], 0.0);
            }
            return t;
        };

        ArcSearchResult step = backtrack_arc(p, h, g, r, make_trial);
        if (step.alpha == 0.0 && !identity_scaling) {
            d = r_free;
            step = backtrack_arc(p, h, g, r, make_trial);
        }
        if (step.alpha == 0.0) {
            // The partitioned arc can fail outright when pinning a variable
            // with a small positive gradient costs more than it gains. A plain
            // projected-gradient step over all coordinates always descends
            // away from stationarity, and shrinks such variables until the pin
            // becomes valid.
            part.fixed.clear();
            part.free.resize(k);
            for (std::size_t i = 0; i < k; ++i) part.free[i] = i;
            auto full_trial = [&](double alpha) {
                std::vector<double> t(k);
                for (std::size_t i = 0; i < k; ++i) t[i] = std::max(h[i] - alpha * r[i], 0.0);
                return t;
            };
            step = backtrack_arc(p, h, g, r, full_trial);
        }
        if (step.alpha == 0.0) {
            break; // numerical floor: no decreasing step exists at this point
        }

        std::vector<double> r_next = nnls_gradient(p, step.point);
        std::vector<double> v(k), omega(k);
        for (std::size_t i = 0; i < k; ++i) {
            v[i] = step.point[i] - h[i];
            omega[i] = r_next[i] - r[i];
        }
        state = sr1_update(state, v, omega, kSr1Safeguard);

        if (observer) {
            observer({iter, g, step.objective, step.alpha, part, step.point});
        }
        h = std::move(step.point);
        g = step.objective;
        r = std::move(r_next);
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
    result.objective = nmfkit::nnls_objective(p, result.solution);
    result.converged = converged;
    return result;
}

} // namespace nmfkit
