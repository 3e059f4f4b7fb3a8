#include "nmfkit/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nmfkit/errors.hpp"

namespace nmfkit {

namespace {

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

void reject_negative(const DenseMatrix& m, const std::filesystem::path& path) {
    if (!m.all_nonnegative()) {
        throw ValidationError(path.string() + ": matrix has negative entries; inputs must be >= 0");
    }
}

DenseMatrix load_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::in);
    std::vector<double> data;
    std::size_t rows = 0, cols = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t row_cols = 0;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) {
                    ++used;
                }
                if (used != cell.size()) throw std::invalid_argument(cell);
                data.push_back(v);
            } catch (const std::exception&) {
                throw FormatError(path.string() + ": bad csv value '" + cell + "'", lineno);
            }
            ++row_cols;
        }
        if (rows == 0) {
            cols = row_cols;
        } else if (row_cols != cols) {
            throw FormatError(path.string() + ": ragged row (" + std::to_string(row_cols) +
                                  " values, expected " + std::to_string(cols) + ")",
                              lineno);
        }
        ++rows;
    }
    if (rows == 0) throw FormatError(path.string() + ": empty csv file");
    return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix load_matrix_market(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::in);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    ++lineno;
    std::stringstream header(line);
    std::string banner, object, fmt, field, symmetry;
    header >> banner >> object >> fmt >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || fmt != "coordinate" ||
        field != "real" || symmetry != "general") {
        throw FormatError(path.string() + ": expected '%%MatrixMarket matrix coordinate real general'",
                          lineno);
    }

    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_sizes = false;
    DenseMatrix m;
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::stringstream ss(line);
        if (!have_sizes) {
            if (!(ss >> rows >> cols >> nnz)) {
                throw FormatError(path.string() + ": bad size line", lineno);
            }
            m = DenseMatrix(rows, cols);
            have_sizes = true;
            continue;
        }
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v)) {
            throw FormatError(path.string() + ": bad coordinate entry", lineno);
        }
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw FormatError(path.string() + ": index out of range", lineno);
        }
        m(i - 1, j - 1) = v;
        ++seen;
    }
    if (!have_sizes) throw FormatError(path.string() + ": missing size line");
    if (seen != nnz) {
        throw FormatError(path.string() + ": expected " + std::to_string(nnz) + " entries, found " +
                          std::to_string(seen));
    }
    if (!m.all_finite()) throw FormatError(path.string() + ": non-finite entries");
    return m;
}

// Reads one PGM token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const std::filesystem::path& path) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (tok.empty()) throw FormatError(path.string() + ": truncated pgm header");
    return tok;
}

std::size_t pgm_number(std::istream& in, const std::filesystem::path& path) {
    const std::string tok = pgm_token(in, path);
    try {
        return static_cast<std::size_t>(std::stoul(tok));
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": bad pgm header token '" + tok + "'");
    }
}

// Returns pixels scaled to [0,1], row by row.
std::vector<double> load_pgm_pixels(const std::filesystem::path& path, std::size_t& width,
                                    std::size_t& height) {
    std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
    const std::string magic = pgm_token(in, path);
    if (magic != "P2" && magic != "P5") {
        throw FormatError(path.string() + ": not a P2/P5 pgm file");
    }
    width = pgm_number(in, path);
    height = pgm_number(in, path);
    const std::size_t maxval = pgm_number(in, path);
    if (width == 0 || height == 0 || maxval != 255) {
        throw FormatError(path.string() + ": unsupported pgm dimensions or maxval");
    }
    const std::size_t count = width * height;
    std::vector<double> px(count);
    if (magic == "P5") {
        // single whitespace byte separates the header from raster data
        std::vector<unsigned char> raw(count);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count) {
            throw FormatError(path.string() + ": truncated pgm raster");
        }
        for (std::size_t i = 0; i < count; ++i) px[i] = raw[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t v = pgm_number(in, path);
            if (v > 255) throw FormatError(path.string() + ": pgm sample out of range");
            px[i] = static_cast<double>(v) / 255.0;
        }
    }
    return px;
}

} // namespace

MatrixFormat format_from_string(const std::string& name) {
    if (name == "csv") return MatrixFormat::csv;
    if (name == "matrixmarket" || name == "mtx" || name == "mm") return MatrixFormat::matrixmarket;
    if (name == "pgm") return MatrixFormat::pgm;
    throw ValidationError("unknown matrix format '" + name + "' (expected csv, matrixmarket or pgm)");
}

std::string to_string(MatrixFormat format) {
    switch (format) {
        case MatrixFormat::csv: return "csv";
        case MatrixFormat::matrixmarket: return "matrixmarket";
        case MatrixFormat::pgm: return "pgm";
    }
    return "unknown";
}

MatrixFormat detect_format(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return MatrixFormat::pgm; // image sets
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".csv") return MatrixFormat::csv;
    if (ext == ".mtx" || ext == ".mm") return MatrixFormat::matrixmarket;
    if (ext == ".pgm") return MatrixFormat::pgm;
    throw FormatError(path.string() + ": cannot infer matrix format from extension");
}

DenseMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
    DenseMatrix m;
    switch (format) {
        case MatrixFormat::csv: m = load_csv(path); break;
        case MatrixFormat::matrixmarket: m = load_matrix_market(path); break;
        case MatrixFormat::pgm: {
            std::size_t width = 0, height = 0;
            std::vector<double> px = load_pgm_pixels(path, width, height);
            const std::size_t count = px.size();
            m = DenseMatrix(count, 1, std::move(px));
            break;
        }
    }
    reject_negative(m, path);
    return m;
}

DenseMatrix load_pgm_set(const std::vector<std::filesystem::path>& paths, std::size_t& width,
                         std::size_t& height) {
    if (paths.empty()) throw ValidationError("load_pgm_set: no input images");
    width = height = 0;
    DenseMatrix m;
    for (std::size_t j = 0; j < paths.size(); ++j) {
        std::size_t w = 0, h = 0;
        const std::vector<double> px = load_pgm_pixels(paths[j], w, h);
        if (j == 0) {
            width = w;
            height = h;
            m = DenseMatrix(px.size(), paths.size());
        } else if (w != width || h != height) {
            throw ValidationError(paths[j].string() + ": image size differs from the first image");
        }
        m.set_column(j, px);
    }
    return m;
}

std::vector<std::filesystem::path> collect_pgm_paths(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw IoError(path.string() + ": no such file or directory");
    if (!fs::is_directory(path)) return {path};
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw IoError(path.string() + ": directory contains no .pgm files");
    return out;
}

void save_csv(const DenseMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    char buf[32];
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", a(i, j));
            out << buf << (j + 1 < a.cols() ? "," : "");
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void save_matrix_market(const DenseMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    std::size_t nnz = 0;
    for (double v : a.data()) nnz += v != 0.0;
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
    char buf[32];
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%.17g", a(i, j));
            out << (i + 1) << ' ' << (j + 1) << ' ' << buf << '\n';
        }
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void save_reconstruction(const NmfModel& model, std::size_t column, std::size_t width,
                         std::size_t height, const std::filesystem::path& path) {
    if (width * height != model.w.rows()) {
        throw ShapeError("save_reconstruction: width*height != rows of W");
    }
    if (column >= model.h.cols()) {
        throw ShapeError("save_reconstruction: column index out of range");
    }
    // reconstructed column of W*H
    std::vector<double> px(model.w.rows(), 0.0);
    for (std::size_t i = 0; i < model.w.rows(); ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < model.w.cols(); ++a) s += model.w(i, a) * model.h(a, column);
        px[i] = s;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << width << ' ' << height << "\n255\n";
    for (double v : px) {
        const double c = std::clamp(v, 0.0, 1.0);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace nmfkit
