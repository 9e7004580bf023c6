#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "../error.hpp"

namespace revival::numerics {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    /// Copy of the listed columns, in the given order.
    Matrix columns(std::span<const std::size_t> which) const {
        Matrix out(rows_, which.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < which.size(); ++c) out(r, c) = (*this)(r, which[c]);
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Solves the symmetric positive definite system `a x = b` by Cholesky.
/// Returns false when `a` is not numerically positive definite.
inline bool solve_spd(Matrix a, std::span<const double> b, std::vector<double>& x) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        a(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / a(j, j);
        }
    }
    x.assign(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) x[i] -= a(i, k) * x[k];
        x[i] /= a(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) x[i] -= a(k, i) * x[k];
        x[i] /= a(i, i);
    }
    return true;
}

}  // namespace revival::numerics
