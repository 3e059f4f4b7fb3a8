#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nmfkit/errors.hpp"
#include "nmfkit/nmf.hpp"
#include "nmfkit/nnls.hpp"
#include "nmfkit/oracle.hpp"
#include "support.hpp"

using namespace nmfkit;
using testsupport::random_matrix;

namespace {

double objective(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
    const double e = frobenius_norm(subtract(v, matmul(w, h)));
    return 0.5 * e * e;
}

// central finite differences of 0.5*||V - WH||_F^2 in the entries of x, where
// rebuild(x) returns the perturbed factor pair
template <typename Rebuild>
DenseMatrix fd_gradient(const DenseMatrix& v, DenseMatrix x, const Rebuild& rebuild) {
    const double step = 1e-5;
    DenseMatrix g(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double save = x.data()[i];
        x.data()[i] = save + step;
        const auto [wp, hp] = rebuild(x);
        const double fp = objective(v, wp, hp);
        x.data()[i] = save - step;
        const auto [wm, hm] = rebuild(x);
        const double fm = objective(v, wm, hm);
        x.data()[i] = save;
        g.data()[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

} // namespace

TEST_CASE("grad_h vanishes at an exact factorization") {
    Rng rng(51);
    const DenseMatrix w = random_matrix(rng, 7, 3);
    const DenseMatrix h = random_matrix(rng, 3, 5);
    const DenseMatrix g = grad_h(matmul(w, h), w, h);
    CHECK(frobenius_norm(g) < 1e-10);
}

TEST_CASE("grad_h and grad_w match finite differences") {
    Rng rng(52);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t n = 3 + rng.below(6), m = 3 + rng.below(6), k = 1 + rng.below(3);
        const DenseMatrix v = random_matrix(rng, n, m);
        const DenseMatrix w = random_matrix(rng, n, k, 0.1, 1.0);
        const DenseMatrix h = random_matrix(rng, k, m, 0.1, 1.0);

        const DenseMatrix gh = grad_h(v, w, h);
        const DenseMatrix fd_h =
            fd_gradient(v, h, [&](const DenseMatrix& x) { return std::pair{w, x}; });
        CHECK(frobenius_norm(subtract(gh, fd_h)) < 1e-5 * std::max(1.0, frobenius_norm(gh)));

        const DenseMatrix gw = grad_w(v, w, h);
        const DenseMatrix fd_w =
            fd_gradient(v, w, [&](const DenseMatrix& x) { return std::pair{x, h}; });
        CHECK(frobenius_norm(subtract(gw, fd_w)) < 1e-5 * std::max(1.0, frobenius_norm(gw)));
    }
}

TEST_CASE("gradients with orthonormal factors collapse to the linear form") {
    // W^T W = I: grad_h = H - W^T V
    const DenseMatrix w(2, 2, {1.0, 0.0, 0.0, 1.0});
    Rng rng(53);
    const DenseMatrix v = random_matrix(rng, 2, 4);
    const DenseMatrix h = random_matrix(rng, 2, 4);
    const DenseMatrix g = grad_h(v, w, h);
    const DenseMatrix expect = subtract(h, matmul(transpose(w), v));
    CHECK(frobenius_norm(subtract(g, expect)) < 1e-12);
}

TEST_CASE("solve_h_subproblem with one column reduces to a single nnls_solve") {
    Rng rng(54);
    const DenseMatrix w = random_matrix(rng, 8, 3);
    const DenseMatrix v = random_matrix(rng, 8, 1);
    const DenseMatrix h0 = random_matrix(rng, 3, 1);
    SolverConfig cfg;

    const DenseMatrix h = solve_h_subproblem(v, w, h0, cfg);
    const NnlsProblem p = make_nnls_problem(w, v.column(0));
    const NnlsResult direct = nnls_solve(p, h0.column(0), cfg);
    for (std::size_t i = 0; i < 3; ++i) CHECK(h(i, 0) == direct.solution[i]);
}

TEST_CASE("solve_h_subproblem recovers an exact nonnegative H") {
    Rng rng(55);
    const DenseMatrix w = random_matrix(rng, 10, 3, 0.1, 1.0);
    const DenseMatrix h_true = random_matrix(rng, 3, 6, 0.2, 1.0);
    const DenseMatrix v = matmul(w, h_true);
    const DenseMatrix h0 = random_matrix(rng, 3, 6, 0.1, 1.0);
    SolverConfig cfg;
    cfg.maxiter_inner = 200;
    cfg.kkt_tol = 1e-10;

    const DenseMatrix h = solve_h_subproblem(v, w, h0, cfg);
    for (std::size_t i = 0; i < h.size(); ++i) {
        CHECK(std::abs(h.data()[i] - h_true.data()[i]) < 1e-6);
    }
}

TEST_CASE("solve_h_subproblem never increases the subproblem objective") {
    Rng rng(56);
    const DenseMatrix v = random_matrix(rng, 9, 7);
    const DenseMatrix w = random_matrix(rng, 9, 4);
    const DenseMatrix h0 = random_matrix(rng, 4, 7);
    SolverConfig cfg;
    const DenseMatrix h = solve_h_subproblem(v, w, h0, cfg);
    CHECK(objective(v, w, h) <= objective(v, w, h0) + 1e-12);
    CHECK(h.all_nonnegative());
}

TEST_CASE("solve_h_subproblem matches the oracle column by column") {
    Rng rng(57);
    const DenseMatrix v = random_matrix(rng, 12, 5);
    const DenseMatrix w = random_matrix(rng, 12, 6);
    const DenseMatrix h0(6, 5);
    SolverConfig cfg;
    cfg.maxiter_inner = 200;
    cfg.kkt_tol = 1e-9;
    const DenseMatrix h = solve_h_subproblem(v, w, h0, cfg);
    for (std::size_t j = 0; j < 5; ++j) {
        const NnlsProblem p = make_nnls_problem(w, v.column(j));
        const OracleSolution truth = oracle_nnls(p);
        CHECK(std::abs(nnls_objective(p, h.column(j)) - truth.objective) <= 1e-8);
    }
}

TEST_CASE("solve_w_subproblem mirrors solve_h_subproblem through transposition") {
    Rng rng(58);
    const DenseMatrix v = random_matrix(rng, 7, 9);
    const DenseMatrix h = random_matrix(rng, 4, 9);
    const DenseMatrix w0 = random_matrix(rng, 7, 4);
    SolverConfig cfg;

    const DenseMatrix w = solve_w_subproblem(v, h, w0, cfg);
    const DenseMatrix dual =
        transpose(solve_h_subproblem(transpose(v), transpose(h), transpose(w0), cfg));
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.data()[i] == dual.data()[i]);
}

TEST_CASE("solve_w_subproblem with one row is a single NNLS in k variables") {
    Rng rng(59);
    const DenseMatrix v = random_matrix(rng, 1, 8);
    const DenseMatrix h = random_matrix(rng, 3, 8);
    const DenseMatrix w0 = random_matrix(rng, 1, 3);
    SolverConfig cfg;
    const DenseMatrix w = solve_w_subproblem(v, h, w0, cfg);
    CHECK(w.rows() == 1);
    CHECK(w.cols() == 3);
    CHECK(w.all_nonnegative());
}

TEST_CASE("solve_w_subproblem recovers an exact nonnegative W") {
    Rng rng(60);
    const DenseMatrix w_true = random_matrix(rng, 6, 3, 0.2, 1.0);
    const DenseMatrix h = random_matrix(rng, 3, 10, 0.1, 1.0);
    const DenseMatrix v = matmul(w_true, h);
    const DenseMatrix w0 = random_matrix(rng, 6, 3, 0.1, 1.0);
    SolverConfig cfg;
    cfg.maxiter_inner = 200;
    cfg.kkt_tol = 1e-10;
    const DenseMatrix w = solve_w_subproblem(v, h, w0, cfg);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(std::abs(w.data()[i] - w_true.data()[i]) < 1e-6);
    }
}

TEST_CASE("nmf_solve on a zero matrix collapses to the zero model") {
    const DenseMatrix v(6, 4);
    const NmfModel start = make_random_model(6, 4, 2, 7);
    SolverConfig cfg;
    const NmfRun run = nmf_solve(v, 2, start.w, start.h, Method::sr1, cfg);
    CHECK(run.trace.back().objective <= 1e-8);
    CHECK(run.trace.size() <= 5);
    CHECK(frobenius_norm(matmul(run.model.w, run.model.h)) <= 1e-3);
}

TEST_CASE("one outer iteration of SR1 descends from the start") {
    Rng rng(61);
    const DenseMatrix v = random_matrix(rng, 12, 9);
    const NmfModel start = make_random_model(12, 9, 3, 3);
    SolverConfig cfg;
    cfg.maxiter_outer = 1;
    const NmfRun run = nmf_solve(v, 3, start.w, start.h, Method::sr1, cfg);
    REQUIRE(run.trace.size() == 1);
    CHECK(run.trace[0].objective <= objective(v, start.w, start.h));
}

TEST_CASE("nmf_solve reaches small relative error on exact low-rank data") {
    int hits = 0;
    for (std::int64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(static_cast<std::uint64_t>(100 + seed));
        const DenseMatrix w_true = random_matrix(rng, 20, 3);
        const DenseMatrix h_true = random_matrix(rng, 3, 10);
        const DenseMatrix v = matmul(w_true, h_true);
        const NmfModel start = make_random_model(20, 10, 3, seed);
        SolverConfig cfg;
        cfg.maxiter_outer = 100;
        cfg.rel_change_tol = 1e-14;
        const NmfRun run = nmf_solve(v, 3, start.w, start.h, Method::sr1, cfg);
        if (relative_error(v, run.model) < 1e-3) ++hits;
    }
    CHECK(hits >= 6); // majority of seeds succeed
}

TEST_CASE("nmf_solve is deterministic for a fixed start") {
    Rng rng(62);
    const DenseMatrix v = random_matrix(rng, 10, 8);
    const NmfModel start = make_random_model(10, 8, 3, 11);
    SolverConfig cfg;
    cfg.maxiter_outer = 15;
    const NmfRun a = nmf_solve(v, 3, start.w, start.h, Method::sr1, cfg);
    const NmfRun b = nmf_solve(v, 3, start.w, start.h, Method::sr1, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].objective == b.trace[i].objective);
        CHECK(a.trace[i].relative_error == b.trace[i].relative_error);
    }
}

TEST_CASE("permuting data columns permutes the fitted H identically") {
    Rng rng(63);
    const std::size_t m = 6;
    const DenseMatrix v = random_matrix(rng, 8, m);
    const NmfModel start = make_random_model(8, m, 2, 5);
    SolverConfig cfg;
    cfg.maxiter_outer = 10;

    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::swap(perm[0], perm[3]);
    std::swap(perm[2], perm[5]);

    DenseMatrix v_perm(8, m), h0_perm(2, m);
    for (std::size_t j = 0; j < m; ++j) {
        v_perm.set_column(j, v.column(perm[j]));
        h0_perm.set_column(j, start.h.column(perm[j]));
    }

    const NmfRun base = nmf_solve(v, 2, start.w, start.h, Method::sr1, cfg);
    const NmfRun permuted = nmf_solve(v_perm, 2, start.w, h0_perm, Method::sr1, cfg);
    REQUIRE(base.trace.size() == permuted.trace.size());
    for (std::size_t i = 0; i < base.trace.size(); ++i) {
        CHECK(std::abs(base.trace[i].objective - permuted.trace[i].objective) <= 1e-10);
    }
    for (std::size_t j = 0; j < m; ++j) {
        const auto expect = base.model.h.column(perm[j]);
        const auto got = permuted.model.h.column(j);
        for (std::size_t i = 0; i < expect.size(); ++i) {
            CHECK(std::abs(got[i] - expect[i]) <= 1e-9);
        }
    }
}

TEST_CASE("sharing the Gram across columns changes nothing") {
    Rng rng(64);
    const DenseMatrix v = random_matrix(rng, 9, 6);
    const DenseMatrix w = random_matrix(rng, 9, 3);
    const DenseMatrix h0 = random_matrix(rng, 3, 6);
    SolverConfig cfg;

    const DenseMatrix shared = solve_h_subproblem(v, w, h0, cfg);
    // rebuild the Gram pair from scratch for every column
    DenseMatrix rebuilt(3, 6);
    for (std::size_t j = 0; j < 6; ++j) {
        const NnlsProblem p = make_nnls_problem(w, v.column(j));
        rebuilt.set_column(j, nnls_solve(p, h0.column(j), cfg).solution);
    }
    for (std::size_t i = 0; i < shared.size(); ++i) {
        CHECK(shared.data()[i] == rebuilt.data()[i]);
    }
}

TEST_CASE("relative_error basics") {
    Rng rng(65);
    const DenseMatrix w = random_matrix(rng, 5, 2);
    const DenseMatrix h = random_matrix(rng, 2, 4);
    const DenseMatrix v = matmul(w, h);
    CHECK(relative_error(v, {w, h, 2}) < 1e-12);

    const NmfModel zero{DenseMatrix(5, 2), DenseMatrix(2, 4), 2};
    CHECK(relative_error(v, zero) == doctest::Approx(1.0).epsilon(1e-12));

    const NmfModel junk{random_matrix(rng, 5, 2), random_matrix(rng, 2, 4), 2};
    const double expect = frobenius_norm(subtract(v, matmul(junk.w, junk.h))) / frobenius_norm(v);
    CHECK(std::abs(relative_error(v, junk) - expect) < 1e-12);

    CHECK_THROWS_AS(relative_error(DenseMatrix(3, 3), zero), ValidationError);
}

TEST_CASE("nmf_solve validates its inputs") {
    const NmfModel start = make_random_model(4, 3, 2, 1);
    SolverConfig cfg;
    DenseMatrix neg(4, 3);
    neg(0, 0) = -1.0;
    CHECK_THROWS_AS(nmf_solve(neg, 2, start.w, start.h, Method::sr1, cfg), ValidationError);
    const DenseMatrix v(4, 3);
    CHECK_THROWS_AS(nmf_solve(v, 4, start.w, start.h, Method::sr1, cfg), ValidationError);
    CHECK_THROWS_AS(nmf_solve(v, 2, start.h, start.w, Method::sr1, cfg), ValidationError);
}

TEST_CASE("make_random_model is deterministic and strictly positive") {
    const NmfModel a = make_random_model(5, 4, 2, 9);
    const NmfModel b = make_random_model(5, 4, 2, 9);
    CHECK(a.w.data() == b.w.data());
    CHECK(a.h.data() == b.h.data());
    for (double x : a.w.data()) CHECK(x > 0.0);
    for (double x : a.h.data()) CHECK(x > 0.0);
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::sr1, Method::multiplicative, Method::projected_als,
                     Method::projected_gradient}) {
        CHECK(method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(method_from_string("bfgs"), ValidationError);
}
