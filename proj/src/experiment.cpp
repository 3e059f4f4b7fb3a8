#include "nmfkit/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nmfkit/errors.hpp"
#include "nmfkit/matrix_io.hpp"
#include "nmfkit/synthetic.hpp"

namespace nmfkit {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool is_synthetic(const std::string& source) {
    return source == "synthetic-uniform" || source == "synthetic-lowrank";
}

DenseMatrix load_source(const ExperimentSpec& spec, std::int64_t seed) {
    if (spec.source == "synthetic-uniform" || spec.source == "synthetic-lowrank") {
        return generate_synthetic(synthetic_kind_from_string(spec.source), spec.n, spec.m, spec.k,
                                  seed);
    }
    if (spec.source == "csv-file") return load_matrix(spec.input, MatrixFormat::csv);
    if (spec.source == "matrixmarket-file") return load_matrix(spec.input, MatrixFormat::matrixmarket);
    if (spec.source == "pgm-image-set") {
        std::size_t w = 0, h = 0;
        return load_pgm_set(collect_pgm_paths(spec.input), w, h);
    }
    throw ValidationError("unknown source '" + spec.source + "'");
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::int64_t init_seed_for(std::int64_t seed) {
    // splitmix64 step keeps data and init streams unrelated for every seed
    std::uint64_t z = static_cast<std::uint64_t>(seed) + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<std::int64_t>(z ^ (z >> 31));
}

void ExperimentSpec::validate() const {
    if (source.empty()) throw ValidationError("experiment: source is required");
    if (is_synthetic(source)) {
        if (n < 1 || m < 1) throw ValidationError("experiment: synthetic sources need n and m");
        if (k > std::min(n, m)) throw ValidationError("experiment: k must be <= min(n, m)");
    } else if (input.empty()) {
        throw ValidationError("experiment: file sources need input=");
    }
    if (k < 1) throw ValidationError("experiment: k is required");
    if (methods.empty()) throw ValidationError("experiment: at least one method is required");
    if (seeds.empty()) throw ValidationError("experiment: at least one seed is required");
    if (maxiter < 1) throw ValidationError("experiment: maxiter must be >= 1");
    if (output_dir.empty()) throw ValidationError("experiment: out= directory is required");
}

ExperimentSpec parse_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());

    ExperimentSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(path.string() + ": expected key=value", lineno);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "source") {
                spec.source = value;
            } else if (key == "input") {
                spec.input = value;
            } else if (key == "n") {
                spec.n = std::stoul(value);
            } else if (key == "m") {
                spec.m = std::stoul(value);
            } else if (key == "k" || key == "rank") {
                spec.k = std::stoul(value);
            } else if (key == "methods") {
                for (const auto& name : split_list(value)) {
                    spec.methods.push_back(method_from_string(name));
                }
            } else if (key == "seeds") {
                for (const auto& s : split_list(value)) spec.seeds.push_back(std::stoll(s));
            } else if (key == "maxiter") {
                spec.maxiter = std::stoul(value);
            } else if (key == "maxiter_inner") {
                spec.maxiter_inner = std::stoul(value);
            } else if (key == "max_seconds") {
                spec.max_seconds = std::stod(value);
            } else if (key == "tol") {
                spec.kkt_tol = std::stod(value);
            } else if (key == "rel_change_tol") {
                spec.rel_change_tol = std::stod(value);
            } else if (key == "out" || key == "output_dir") {
                spec.output_dir = value;
            } else {
                throw ValidationError("unknown config key '" + key + "'");
            }
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError(path.string() + ": bad value for '" + key + "'", lineno);
        }
    }
    spec.validate();
    return spec;
}

void write_trace_csv(const std::vector<IterationTrace>& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "iter,elapsed_ms,objective,rel_error,kkt_h,kkt_w\n";
    for (const IterationTrace& t : trace) {
        out << t.iteration << ',' << format_real(t.elapsed_ms) << ',' << format_real(t.objective)
            << ',' << format_real(t.relative_error) << ',' << format_real(t.kkt_residual_h) << ','
            << format_real(t.kkt_residual_w) << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    spec.validate();
    fs::create_directories(spec.output_dir);

    SolverConfig cfg;
    cfg.maxiter_outer = spec.maxiter;
    cfg.maxiter_inner = spec.maxiter_inner;
    cfg.kkt_tol = spec.kkt_tol;
    cfg.rel_change_tol = spec.rel_change_tol;

    ExperimentReport report;
    // rel_error per iteration index, per method, across seeds
    std::map<Method, std::vector<std::vector<double>>> rel_histories;

    for (const Method method : spec.methods) {
        for (const std::int64_t seed : spec.seeds) {
            const std::string stem = to_string(method) + "_seed" + std::to_string(seed);
            try {
                const DenseMatrix v = load_source(spec, seed);
                if (spec.k > std::min(v.rows(), v.cols())) {
                    throw ValidationError("experiment: k exceeds min(n, m) of the loaded matrix");
                }
                cfg.seed = seed;
                const NmfModel start =
                    make_random_model(v.rows(), v.cols(), spec.k, init_seed_for(seed));
                const NmfRun run =
                    nmf_solve(v, spec.k, start.w, start.h, method, cfg, spec.max_seconds);

                const fs::path trace_path = spec.output_dir / (stem + ".csv");
                write_trace_csv(run.trace, trace_path);
                save_csv(run.model.w, spec.output_dir / (stem + "_W.csv"));
                save_csv(run.model.h, spec.output_dir / (stem + "_H.csv"));
                report.trace_files.push_back(trace_path);

                std::vector<double> rel;
                rel.reserve(run.trace.size());
                for (const IterationTrace& t : run.trace) rel.push_back(t.relative_error);
                rel_histories[method].push_back(std::move(rel));
            } catch (const std::exception& e) {
                const std::string msg = stem + ": " + e.what();
                std::cerr << "run failed: " << msg << '\n';
                report.failures.push_back(msg);
            }
        }
    }

    for (const auto& [method, histories] : rel_histories) {
        std::size_t longest = 0;
        for (const auto& h : histories) longest = std::max(longest, h.size());
        const fs::path mean_path = spec.output_dir / (to_string(method) + "_mean.csv");
        std::ofstream out(mean_path);
        if (!out) throw IoError("cannot open " + mean_path.string() + " for writing");
        out << "iter,rel_error\n";
        for (std::size_t i = 0; i < longest; ++i) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& h : histories) {
                if (i < h.size()) {
                    sum += h[i];
                    ++count;
                }
            }
            out << (i + 1) << ',' << format_real(sum / static_cast<double>(count)) << '\n';
        }
        if (!out) throw IoError("failed writing " + mean_path.string());
        report.mean_files.push_back(mean_path);
    }
    return report;
}

} // namespace nmfkit
