#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "simreal/rng.hpp"

namespace simreal {

// Dense row-major matrix of doubles. Deliberately minimal: the only
// accumulation the library ever does is left-to-right over the contracted
// index, so results are bit-reproducible across runs and platforms.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::string shape_str() const;
    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Standard product; inner sums run left-to-right over the contracted index.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

// Adds v to every row of a; the one broadcast the library allows.
Matrix add_row_broadcast(const Matrix& a, std::span<const double> v);

// Column sums, left-to-right over rows.
std::vector<double> col_sum(const Matrix& a);

Matrix rand_normal(Rng& rng, std::size_t rows, std::size_t cols);
Matrix rand_uniform(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi);

}  // namespace simreal
