#include "nmfkit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmfkit/errors.hpp"

namespace nmfkit {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (!all_finite()) {
        throw ValidationError("matrix contains non-finite entries");
    }
}

std::vector<double> DenseMatrix::column(std::size_t j) const {
    std::vector<double> col(rows_);
    for (std::size_t i = 0; i < rows_; ++i) col[i] = (*this)(i, j);
    return col;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

bool DenseMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool DenseMatrix::all_nonnegative() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    // i-l-j order keeps both b and c row accesses contiguous.
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<double> ci = c.row(i);
        for (std::size_t l = 0; l < k; ++l) {
            const double ail = a(i, l);
            if (ail == 0.0) continue;
            const std::span<const double> bl = b.row(l);
            for (std::size_t j = 0; j < m; ++j) ci[j] += ail * bl[j];
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("subtract: shape mismatch");
    }
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

namespace {

// Plain in-place Cholesky; returns false when a pivot is non-positive or non-finite.
bool cholesky(std::vector<double>& m, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = m[j * n + j];
        for (std::size_t l = 0; l < j; ++l) d -= m[j * n + l] * m[j * n + l];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        m[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m[i * n + j];
            for (std::size_t l = 0; l < j; ++l) s -= m[i * n + l] * m[j * n + l];
            m[i * n + j] = s / ljj;
        }
    }
    return true;
}

} // namespace

std::vector<double> solve_spd(const DenseMatrix& a, std::span<const double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw ShapeError("solve_spd: system is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", rhs length " + std::to_string(b.size()));
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);

    std::vector<double> fac;
    double shift = 1e-12 * trace;
    bool ok = false;
    for (int attempt = 0; attempt <= 3 && !ok; ++attempt) {
        fac = a.data();
        if (attempt > 0) {
            for (std::size_t i = 0; i < n; ++i) fac[i * n + i] += shift;
            shift *= 10.0;
        }
        ok = cholesky(fac, n);
    }
    if (!ok) throw NumericalError("solve_spd: matrix is not positive definite");

    // forward then backward substitution with the packed factor
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t l = 0; l < i; ++l) s -= fac[i * n + l] * x[l];
        x[i] = s / fac[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t l = ii + 1; l < n; ++l) s -= fac[l * n + ii] * x[l];
        x[ii] = s / fac[ii * n + ii];
    }
    return x;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) {
    return std::sqrt(dot(x, x));
}

double norm_inf(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

} // namespace nmfkit
