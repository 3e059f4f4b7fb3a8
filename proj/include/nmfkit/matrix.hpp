#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nmfkit {

/// Dense row-major matrix of doubles. The single value type of the library:
/// carries the data matrix V, the factors W and H, and all Gram products.
class DenseMatrix {
public:
    DenseMatrix() = default;

    // Zero-initialized rows x cols.
    DenseMatrix(std::size_t rows, std::size_t cols);

    // Takes ownership of row-major data; throws ShapeError on size mismatch
    // and ValidationError if any entry is non-finite.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

    bool all_finite() const;
    bool all_nonnegative() const;

    static DenseMatrix identity(std::size_t n);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a * b; throws ShapeError when inner dimensions disagree.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

// Entry-wise a - b.
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& a);

/// Solves a*x = b for symmetric positive definite a by Cholesky factorization.
/// On factorization failure retries with an escalating diagonal shift
/// (1e-12 * trace, x10 per retry, at most 3 retries), then throws NumericalError.
std::vector<double> solve_spd(const DenseMatrix& a, std::span<const double> b);

// Shared small-vector helpers (no BLAS at desk scale).
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);

} // namespace nmfkit
