#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "../error.hpp"
#include "matrix.hpp"

namespace revival::numerics {

struct OlsSolution {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double ssr = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
};

/// Relative pivot size below which the design is treated as rank deficient.
inline constexpr double kSingularTolerance = 1e-10;

/// Ordinary least squares via Householder QR of the design matrix.
inline OlsSolution ols_fit(const Matrix& design, std::span<const double> response) {
    const std::size_t n = design.rows();
    const std::size_t k = design.cols();
    if (k == 0 || n < k) throw Error("ols requires n >= k >= 1");
    if (response.size() != n) throw Error("response length does not match design rows");

    Matrix r = design;
    std::vector<double> qty(response.begin(), response.end());
    std::vector<double> v(n);

    for (std::size_t j = 0; j < k; ++j) {
        double scale = 0.0;
        for (std::size_t i = j; i < n; ++i) scale = std::max(scale, std::abs(r(i, j)));
        if (scale == 0.0) throw Error("singular design matrix");

        double sq = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            v[i] = r(i, j) / scale;
            sq += v[i] * v[i];
        }
        const double norm = std::sqrt(sq);
        const double alpha = v[j] > 0.0 ? -norm : norm;
        v[j] -= alpha;
        double vtv = 0.0;
        for (std::size_t i = j; i < n; ++i) vtv += v[i] * v[i];
        if (vtv > 0.0) {
            for (std::size_t c = j; c < k; ++c) {
                double s = 0.0;
                for (std::size_t i = j; i < n; ++i) s += v[i] * r(i, c);
                s = 2.0 * s / vtv;
                for (std::size_t i = j; i < n; ++i) r(i, c) -= s * v[i];
            }
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += v[i] * qty[i];
            s = 2.0 * s / vtv;
            for (std::size_t i = j; i < n; ++i) qty[i] -= s * v[i];
        }
    }

    double largest = 0.0;
    for (std::size_t j = 0; j < k; ++j) largest = std::max(largest, std::abs(r(j, j)));
    for (std::size_t j = 0; j < k; ++j)
        if (!(std::abs(r(j, j)) >= kSingularTolerance * largest) || largest == 0.0)
            throw Error("singular design matrix");

    OlsSolution out;
    out.n_obs = n;
    out.n_params = k;
    out.coefficients.assign(k, 0.0);
    for (std::size_t j = k; j-- > 0;) {
        double s = qty[j];
        for (std::size_t c = j + 1; c < k; ++c) s -= r(j, c) * out.coefficients[c];
        out.coefficients[j] = s / r(j, j);
    }
    for (double c : out.coefficients)
        if (!std::isfinite(c)) throw Error("singular design matrix");

    out.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.residuals[i] = response[i] - dot(design.row(i), out.coefficients);
        out.ssr += out.residuals[i] * out.residuals[i];
    }
    return out;
}

}  // namespace revival::numerics
