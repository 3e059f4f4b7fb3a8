#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nmfkit/matrix.hpp"
#include "nmfkit/nmf.hpp"

namespace nmfkit {

/// A benchmark run: data source, problem size, methods to compare, and one
/// run per (method, seed). For synthetic sources each seed regenerates the
/// data matrix; within a seed every method shares the same data and starting
/// factors, so traces are directly comparable.
struct ExperimentSpec {
    std::string source; // synthetic-uniform | synthetic-lowrank | csv-file |
                        // matrixmarket-file | pgm-image-set
    std::filesystem::path input;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 0;
    std::vector<Method> methods;
    std::vector<std::int64_t> seeds;
    std::size_t maxiter = 200;
    double max_seconds = 0.0; // optional wall-clock cap per run, 0 = off
    std::size_t maxiter_inner = 20;
    double kkt_tol = 1e-6;
    double rel_change_tol = 1e-9;
    std::filesystem::path output_dir;

    void validate() const;
};

/// Reads a flat key=value file with '#' comments. Keys: source, input, n, m,
/// k, methods, seeds, maxiter, maxiter_inner, max_seconds, tol,
/// rel_change_tol, out. Unknown keys are rejected.
ExperimentSpec parse_experiment_config(const std::filesystem::path& path);

struct ExperimentReport {
    std::vector<std::filesystem::path> trace_files;
    std::vector<std::filesystem::path> mean_files;
    std::vector<std::string> failures; // one line per failed run
};

/// Runs every (method, seed) pair. Per run writes
///   <method>_seed<seed>.csv            iter,elapsed_ms,objective,rel_error,kkt_h,kkt_w
///   <method>_seed<seed>_W.csv / _H.csv final factors
/// and per method a <method>_mean.csv with rel_error averaged across seeds by
/// iteration index. Failed runs are logged and skipped; finished traces stay.
ExperimentReport run_experiment(const ExperimentSpec& spec);

void write_trace_csv(const std::vector<IterationTrace>& trace, const std::filesystem::path& path);

// Derives the starting-factor seed from a data seed so the two streams differ.
std::int64_t init_seed_for(std::int64_t seed);

} // namespace nmfkit
