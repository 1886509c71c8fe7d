#include "simreal/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "simreal/errors.hpp"

namespace simreal {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + shape_str());
    }
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shapes " + a.shape_str() + " and " +
                         b.shape_str() + " differ");
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions of " + a.shape_str() + " and " +
                         b.shape_str() + " do not match");
    }
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    Matrix c(n, m, 0.0);
    // i-j-k ordering: each c(i,:) accumulates in increasing j, which is the
    // deterministic left-to-right sum over the contracted index.
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c.data().data() + i * m;
        const double* arow = a.data().data() + i * k;
        for (std::size_t j = 0; j < k; ++j) {
            const double aij = arow[j];
            const double* brow = b.data().data() + j * m;
            for (std::size_t t = 0; t < m; ++t) crow[t] += aij * brow[t];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t.at(c, r) = a.at(r, c);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
    return c;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix c = a;
    for (double& v : c.data()) v *= factor;
    return c;
}

Matrix add_row_broadcast(const Matrix& a, std::span<const double> v) {
    if (v.size() != a.cols()) {
        throw ShapeError("add_row_broadcast: vector length " + std::to_string(v.size()) +
                         " does not match " + a.shape_str());
    }
    Matrix c = a;
    for (std::size_t r = 0; r < c.rows(); ++r) {
        double* crow = c.data().data() + r * c.cols();
        for (std::size_t j = 0; j < c.cols(); ++j) crow[j] += v[j];
    }
    return c;
}

std::vector<double> col_sum(const Matrix& a) {
    std::vector<double> s(a.cols(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t j = 0; j < a.cols(); ++j) s[j] += a.at(r, j);
    return s;
}

Matrix rand_normal(Rng& rng, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("rand_normal: dimensions must be positive, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.next_normal();
    return m;
}

Matrix rand_uniform(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("rand_uniform: dimensions must be positive, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.next_uniform(lo, hi);
    return m;
}

}  // namespace simreal
