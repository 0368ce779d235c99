#include "lc/matrix.hpp"

#include <cmath>

namespace lc {

namespace {
void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw config_error(std::string(op) + ": shape mismatch " +
                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}
}  // namespace

Matrix& Matrix::operator+=(const Matrix& o) {
    check_same_shape(*this, o, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    check_same_shape(*this, o, "sub");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw config_error("matmul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.rows()));
    }
    Matrix out(a.rows(), b.cols());
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* orow = out.row(i);
        const double* arow = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw config_error("matmul_nt: inner dimensions " + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
            orow[j] = s;
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw config_error("matmul_tn: inner dimensions " + std::to_string(a.rows()) + " vs " +
                           std::to_string(b.rows()));
    }
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row(k);
        const double* brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix hadamard(Matrix a, const Matrix& b) {
    check_same_shape(a, b, "hadamard");
    for (std::size_t i = 0; i < a.size(); ++i) a.values()[i] *= b.values()[i];
    return a;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::fabs(v));
    return m;
}

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

Matrix col_sums(const Matrix& a) {
    Matrix out(1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += arow[j];
    }
    return out;
}

}  // namespace lc
