#include "nmfkit/oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "nmfkit/errors.hpp"

namespace nmfkit {

namespace {

constexpr std::size_t kMaxDim = 14;
constexpr double kKktSlack = 1e-9;
constexpr double kTieTol = 1e-12;

// true when pattern a (sorted index list of the zeroed variables) precedes b
bool pattern_before(std::uint32_t a, std::uint32_t b, std::size_t k) {
    const int ca = std::popcount(a), cb = std::popcount(b);
    if (ca != cb) return ca < cb;
    for (std::size_t i = 0; i < k; ++i) {
        const bool ia = (a >> i) & 1u, ib = (b >> i) & 1u;
        if (ia != ib) return ia; // the list holding the smaller index sorts first
    }
    return false;
}

} // namespace

OracleSolution oracle_nnls(const NnlsProblem& p) {
    p.validate();
    const std::size_t k = p.size();
    if (k > kMaxDim) {
        throw ValidationError("oracle_nnls: dimension " + std::to_string(k) +
                              " exceeds the enumeration cap of " + std::to_string(kMaxDim));
    }

    double scale = 1.0;
    for (double v : p.linear) scale = std::max(scale, std::abs(v));

    bool have_best = false;
    OracleSolution best;
    for (std::uint32_t pattern = 0; pattern < (1u << k); ++pattern) {
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < k; ++i) {
            if (!((pattern >> i) & 1u)) free.push_back(i);
        }

        std::vector<double> h(k, 0.0);
        if (!free.empty()) {
            DenseMatrix sub(free.size(), free.size());
            std::vector<double> rhs(free.size());
            for (std::size_t a = 0; a < free.size(); ++a) {
                rhs[a] = p.linear[free[a]];
                for (std::size_t b = 0; b < free.size(); ++b) sub(a, b) = p.gram(free[a], free[b]);
            }
            std::vector<double> x;
            try {
                x = solve_spd(sub, rhs);
            } catch (const NumericalError&) {
                continue; // reduced system singular beyond the retry ladder
            }
            bool feasible = true;
            for (double v : x) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            for (std::size_t a = 0; a < free.size(); ++a) h[free[a]] = x[a];
        }

        const std::vector<double> r = nnls_gradient(p, h);
        bool kkt_ok = true;
        for (std::size_t i = 0; i < k; ++i) {
            if (((pattern >> i) & 1u) && r[i] < -kKktSlack * scale) {
                kkt_ok = false;
                break;
            }
        }
        if (!kkt_ok) continue;

        const double obj = nnls_objective(p, h);
        const bool tie = have_best && std::abs(obj - best.objective) <= kTieTol;
        if (!have_best || (tie && pattern_before(pattern, best.active_pattern, k)) ||
            (!tie && obj < best.objective)) {
            best.solution = std::move(h);
            best.objective = obj;
            best.active_pattern = pattern;
            have_best = true;
        }
    }
    // pattern = all-ones always yields the feasible candidate h = 0
    if (!have_best) throw NumericalError("oracle_nnls: no feasible candidate (unreachable)");

    // certify the returned point against the optimality conditions
    const std::vector<double> r = nnls_gradient(p, best.solution);
    double comp = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        comp += best.solution[i] * r[i];
        if (r[i] < -kKktSlack * scale) {
            throw NumericalError("oracle_nnls: self-check failed (negative residual)");
        }
    }
    if (std::abs(comp) > kKktSlack * scale * std::max(1.0, norm_inf(best.solution)) * k) {
        throw NumericalError("oracle_nnls: self-check failed (complementarity)");
    }
    return best;
}

} // namespace nmfkit
