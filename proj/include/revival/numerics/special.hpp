#pragma once

#include <cmath>
#include <limits>

#include "../error.hpp"

namespace revival::numerics {

namespace detail {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a,b), modified Lentz evaluation.
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 100000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

// I_x(a,b) with y = 1 - x supplied separately so callers can keep it exact.
inline double incomplete_beta_xy(double x, double y, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta_xy(y, x, b, a);
    const double front = std::exp(a * std::log(x) + b * std::log(y) - log_beta(a, b));
    return front * beta_continued_fraction(a, b, x) / a;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta: x must lie in [0, 1]");
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw Error("incomplete beta: a and b must be positive and finite");
    return detail::incomplete_beta_xy(x, 1.0 - x, a, b);
}

/// P(F > f) for an F(d1, d2) variate.
inline double f_survival(double f, int d1, int d2) {
    if (d1 <= 0 || d2 <= 0) throw Error("F distribution degrees of freedom must be positive");
    if (std::isnan(f) || f < 0.0) throw Error("F statistic must be non-negative");
    if (f == 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double denom = d2 + d1 * f;
    return detail::incomplete_beta_xy(d2 / denom, d1 * f / denom, 0.5 * d2, 0.5 * d1);
}

}  // namespace revival::numerics
