// Command-line front end: single factorization runs, benchmark sweeps from a
// config file, solver-vs-oracle spot checks, and the image reconstruction
// pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "nmfkit/errors.hpp"
#include "nmfkit/experiment.hpp"
#include "nmfkit/matrix_io.hpp"
#include "nmfkit/nmf.hpp"
#include "nmfkit/nnls.hpp"
#include "nmfkit/oracle.hpp"
#include "nmfkit/rng.hpp"

namespace {

namespace fs = std::filesystem;
using namespace nmfkit;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct FactorizeArgs {
    std::string input;
    std::string format = "auto";
    std::size_t rank = 0;
    std::string method = "sr1";
    std::size_t maxiter = 200;
    std::size_t maxiter_inner = 20;
    std::int64_t seed = 0;
    double tol = 1e-6;
    std::string out;
};

int run_factorize(const FactorizeArgs& args) {
    const fs::path input(args.input);
    const MatrixFormat format = args.format == "auto" ? detect_format(input)
                                                      : format_from_string(args.format);
    DenseMatrix v;
    if (format == MatrixFormat::pgm) {
        std::size_t w = 0, h = 0;
        v = load_pgm_set(collect_pgm_paths(input), w, h);
    } else {
        v = load_matrix(input, format);
    }

    SolverConfig cfg;
    cfg.maxiter_outer = args.maxiter;
    cfg.maxiter_inner = args.maxiter_inner;
    cfg.kkt_tol = args.tol;
    cfg.seed = args.seed;

    const NmfModel start = make_random_model(v.rows(), v.cols(), args.rank, args.seed);
    const NmfRun run =
        nmf_solve(v, args.rank, start.w, start.h, method_from_string(args.method), cfg);

    fs::create_directories(args.out);
    write_trace_csv(run.trace, fs::path(args.out) / "trace.csv");
    save_csv(run.model.w, fs::path(args.out) / "W.csv");
    save_csv(run.model.h, fs::path(args.out) / "H.csv");

    const IterationTrace& last = run.trace.back();
    std::printf("%s: %zu iterations, objective %.6g, relative error %.6g\n", args.method.c_str(),
                last.iteration, last.objective, last.relative_error);
    return kExitOk;
}

int run_bench(const std::string& config_path) {
    const ExperimentSpec spec = parse_experiment_config(config_path);
    const ExperimentReport report = run_experiment(spec);
    std::printf("wrote %zu trace files and %zu mean files to %s\n", report.trace_files.size(),
                report.mean_files.size(), spec.output_dir.string().c_str());
    if (!report.failures.empty()) {
        std::fprintf(stderr, "%zu run(s) failed\n", report.failures.size());
        return kExitNumerical;
    }
    return kExitOk;
}

int run_verify(std::size_t instances, std::size_t max_dim, std::int64_t seed, double tol) {
    if (max_dim < 2 || max_dim > 14) {
        throw ValidationError("verify: --max-dim must be between 2 and 14");
    }
    Rng rng(static_cast<std::uint64_t>(seed));
    SolverConfig cfg;
    cfg.maxiter_inner = 2000;
    cfg.kkt_tol = 1e-10;

    double worst = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t dim = 2 + rng.below(max_dim - 1);
        const std::size_t rows = dim + 2 + rng.below(8);
        DenseMatrix w(rows, dim);
        for (double& x : w.data()) x = rng.uniform01();
        std::vector<double> v(rows);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);

        const NnlsProblem p = make_nnls_problem(w, v);
        const OracleSolution truth = oracle_nnls(p);
        const NnlsResult got = nnls_solve(p, {}, cfg);
        worst = std::max(worst, std::abs(got.objective - truth.objective));
    }
    std::printf("verify: %zu instances, worst objective gap %.3e (tolerance %.1e)\n", instances,
                worst, tol);
    if (worst > tol) {
        std::fprintf(stderr, "verify: solver disagrees with the enumeration oracle\n");
        return kExitNumerical;
    }
    return kExitOk;
}

struct ReconstructArgs {
    std::string input;
    std::size_t rank = 14;
    std::string method = "sr1";
    std::size_t maxiter = 50;
    std::vector<std::size_t> checkpoints;
    std::int64_t seed = 0;
    double tol = 1e-6;
    std::string out;
};

int run_reconstruct(const ReconstructArgs& args) {
    std::size_t width = 0, height = 0;
    const std::vector<fs::path> images = collect_pgm_paths(args.input);
    const DenseMatrix v = load_pgm_set(images, width, height);

    std::vector<std::size_t> checkpoints = args.checkpoints;
    if (checkpoints.empty()) checkpoints.push_back(args.maxiter);

    fs::create_directories(args.out);
    SolverConfig cfg;
    cfg.kkt_tol = args.tol;
    cfg.seed = args.seed;
    const NmfModel start = make_random_model(v.rows(), v.cols(), args.rank, args.seed);

    // One run per checkpoint; a fixed seed makes the shorter runs exact
    // prefixes of the longer ones.
    for (const std::size_t iters : checkpoints) {
        cfg.maxiter_outer = iters;
        cfg.rel_change_tol = 1e-15; // keep iterating to the requested count
        const NmfRun run =
            nmf_solve(v, args.rank, start.w, start.h, method_from_string(args.method), cfg);
        for (std::size_t j = 0; j < v.cols(); ++j) {
            const std::string name = images[j % images.size()].stem().string() + "_iter" +
                                     std::to_string(iters) + ".pgm";
            save_reconstruction(run.model, j, width, height, fs::path(args.out) / name);
        }
        write_trace_csv(run.trace, fs::path(args.out) / ("trace_iter" + std::to_string(iters) + ".csv"));
        std::printf("iter %zu: relative error %.6g\n", iters, run.trace.back().relative_error);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonnegative matrix factorization toolkit (active-set SR1 solver and baselines)"};
    app.require_subcommand(1);

    FactorizeArgs fa;
    CLI::App* factorize = app.add_subcommand("factorize", "Run one factorization on a matrix file");
    factorize->add_option("--input", fa.input, "matrix file (csv, MatrixMarket, pgm dir)")->required();
    factorize->add_option("--format", fa.format, "csv | matrixmarket | pgm | auto");
    factorize->add_option("--rank", fa.rank, "approximation rank k")->required();
    factorize->add_option("--method", fa.method, "sr1 | multiplicative | projected_als | projected_gradient");
    factorize->add_option("--maxiter", fa.maxiter, "outer iteration budget");
    factorize->add_option("--maxiter-inner", fa.maxiter_inner, "inner NNLS iteration budget");
    factorize->add_option("--seed", fa.seed, "seed for the starting factors");
    factorize->add_option("--tol", fa.tol, "KKT stopping tolerance");
    factorize->add_option("--out", fa.out, "output directory")->required();

    std::string config_path;
    CLI::App* bench = app.add_subcommand("bench", "Run an experiment described by a config file");
    bench->add_option("--config", config_path, "key=value experiment config")->required();

    std::size_t verify_instances = 500, verify_max_dim = 10;
    std::int64_t verify_seed = 7;
    double verify_tol = 1e-8;
    CLI::App* verify = app.add_subcommand("verify", "Cross-check the solver against the enumeration oracle");
    verify->add_option("--instances", verify_instances, "number of random instances");
    verify->add_option("--max-dim", verify_max_dim, "largest problem dimension (<= 14)");
    verify->add_option("--seed", verify_seed, "instance generator seed");
    verify->add_option("--tol", verify_tol, "objective agreement tolerance");

    ReconstructArgs ra;
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "Factorize a PGM image set and write reconstructions");
    reconstruct->add_option("--input", ra.input, "pgm file or directory of .pgm images")->required();
    reconstruct->add_option("--rank", ra.rank, "approximation rank k");
    reconstruct->add_option("--method", ra.method, "factorization method");
    reconstruct->add_option("--maxiter", ra.maxiter, "outer iteration budget");
    reconstruct->add_option("--checkpoints", ra.checkpoints, "iteration counts to snapshot (e.g. 10 20 50)");
    reconstruct->add_option("--seed", ra.seed, "seed for the starting factors");
    reconstruct->add_option("--tol", ra.tol, "KKT stopping tolerance");
    reconstruct->add_option("--out", ra.out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*factorize) return run_factorize(fa);
        if (*bench) return run_bench(config_path);
        if (*verify) return run_verify(verify_instances, verify_max_dim, verify_seed, verify_tol);
        if (*reconstruct) return run_reconstruct(ra);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitIo;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
