#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "../error.hpp"
#include "matrix.hpp"

namespace revival::numerics {

struct NlsFit {
    std::vector<double> params;
    double residual_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct NlsOptions {
    std::size_t max_iter = 200;
    /// Stop when the relative residual-norm improvement or the step norm drops below this.
    double tol = 1e-12;
    /// Residual norm treated as an exact fit.
    double abs_tol = 1e-15;
    double initial_damping = 1e-3;
};

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
using JacobianFn = std::function<Matrix(std::span<const double>)>;

/// Central-difference Jacobian with step 1e-6 * max(|param|, 1).
inline Matrix finite_difference_jacobian(const ResidualFn& residual, std::span<const double> params) {
    std::vector<double> probe(params.begin(), params.end());
    Matrix jac;
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double h = 1e-6 * std::max(std::abs(params[j]), 1.0);
        probe[j] = params[j] + h;
        const auto up = residual(probe);
        probe[j] = params[j] - h;
        const auto down = residual(probe);
        probe[j] = params[j];
        if (j == 0) jac = Matrix(up.size(), params.size());
        for (std::size_t i = 0; i < up.size(); ++i) jac(i, j) = (up[i] - down[i]) / (2.0 * h);
    }
    return jac;
}

namespace detail {

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

/// Bounded damped Gauss-Newton (Levenberg-Marquardt) minimisation of ||residual(params)||.
///
/// Damping is multiplied by 10 after a rejected step and divided by 10 after an
/// accepted one; trial points are clamped into `bounds`. Only steps that reduce
/// the residual norm are accepted, so the result is never worse than `init`.
inline NlsFit damped_least_squares(const ResidualFn& residual, const JacobianFn& jacobian,
                                   std::span<const double> init, const Bounds& bounds,
                                   const NlsOptions& options = {}) {
    const std::size_t k = init.size();
    if (k == 0) throw Error("no parameters to fit");
    if (bounds.lower.size() != k || bounds.upper.size() != k)
        throw Error("bounds do not match parameter count");
    if (!(options.tol > 0.0)) throw Error("tolerance must be positive");
    for (std::size_t j = 0; j < k; ++j)
        if (!(init[j] >= bounds.lower[j] && init[j] <= bounds.upper[j]))
            throw Error("initial parameters outside bounds");

    const JacobianFn jac_fn = jacobian ? jacobian : [&](std::span<const double> p) {
        return finite_difference_jacobian(residual, p);
    };

    NlsFit fit;
    fit.params.assign(init.begin(), init.end());
    auto r = residual(fit.params);
    if (r.empty() || !detail::all_finite(r)) throw Error("invalid starting point");
    fit.residual_norm = norm2(r);
    if (fit.residual_norm <= options.abs_tol) {
        fit.converged = true;
        return fit;
    }

    double damping = options.initial_damping;
    Matrix jac = jac_fn(fit.params);
    std::vector<double> step;
    std::vector<double> candidate(k);

    while (fit.iterations < options.max_iter) {
        ++fit.iterations;

        Matrix normal(k, k);
        std::vector<double> gradient(k, 0.0);
        for (std::size_t i = 0; i < jac.rows(); ++i) {
            auto row = jac.row(i);
            for (std::size_t a = 0; a < k; ++a) {
                gradient[a] -= row[a] * r[i];
                for (std::size_t b = 0; b < k; ++b) normal(a, b) += row[a] * row[b];
            }
        }
        double diag_max = 0.0;
        for (std::size_t a = 0; a < k; ++a) diag_max = std::max(diag_max, normal(a, a));
        Matrix damped = normal;
        for (std::size_t a = 0; a < k; ++a)
            damped(a, a) += damping * std::max(normal(a, a), 1e-12 * std::max(diag_max, 1.0));

        double step_norm = 0.0;
        bool improved = false;
        const bool solved = solve_spd(damped, gradient, step);
        if (solved) {
            for (std::size_t j = 0; j < k; ++j) {
                candidate[j] = std::clamp(fit.params[j] + step[j], bounds.lower[j], bounds.upper[j]);
                const double d = candidate[j] - fit.params[j];
                step_norm += d * d;
            }
            step_norm = std::sqrt(step_norm);

            if (step_norm > 0.0) {
                auto trial = residual(candidate);
                const double trial_norm = detail::all_finite(trial) ? norm2(trial)
                                                                   : std::numeric_limits<double>::infinity();
                if (trial_norm < fit.residual_norm) {
                    const double improvement = (fit.residual_norm - trial_norm) / fit.residual_norm;
                    fit.params = candidate;
                    fit.residual_norm = trial_norm;
                    r = std::move(trial);
                    damping = std::max(damping / 10.0, 1e-15);
                    improved = true;
                    if (improvement < options.tol || step_norm < options.tol ||
                        fit.residual_norm <= options.abs_tol) {
                        fit.converged = true;
                        break;
                    }
                    jac = jac_fn(fit.params);
                }
            }
        }
        if (!improved) {
            if (solved && step_norm < options.tol) {
                fit.converged = true;
                break;
            }
            damping *= 10.0;
            if (damping > 1e30) break;
        }
    }
    return fit;
}

}  // namespace revival::numerics
