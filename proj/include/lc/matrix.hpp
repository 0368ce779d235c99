#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lc {

/// Thrown for dimension mismatches, bad configs, and schema violations.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when an operation leaves its mathematical domain
/// (e.g. fractional power of a negative pre-activation).
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dense row-major matrix of doubles. Values, not views; cheap to move.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b. Throws config_error on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * b^t (no materialized transpose).
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// a^t * b.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

/// Elementwise product.
Matrix hadamard(Matrix a, const Matrix& b);

/// max |a_ij|.
double max_abs(const Matrix& a);

/// Frobenius norm.
double frobenius(const Matrix& a);

/// Column sums as a 1 x cols matrix.
Matrix col_sums(const Matrix& a);

}  // namespace lc
