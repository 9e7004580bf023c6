#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numerics/matrix.hpp"
#include "numerics/nls.hpp"
#include "record.hpp"
#include "series.hpp"

namespace revival::bass {

inline constexpr double kMinP = 1e-6;
inline constexpr double kMaxP = 1.0;
inline constexpr double kMinQ = 0.0;
inline constexpr double kMaxQ = 5.0;

/// Innovation (p) and imitation (q) coefficients of the Bass diffusion model.
struct Params {
    double p = 0.03;
    double q = 0.38;

    bool valid() const noexcept {
        return std::isfinite(p) && std::isfinite(q) && p >= kMinP && p <= kMaxP && q >= kMinQ &&
               q <= kMaxQ;
    }
    void validate() const {
        if (!valid()) throw Error("Bass parameters out of range");
    }

    friend bool operator==(const Params&, const Params&) = default;
};

enum class Platform { short_video, web_search };

inline const char* to_string(Platform p) {
    return p == Platform::short_video ? "short_video" : "web_search";
}

struct BassFit {
    Params params;
    Platform platform = Platform::short_video;
    double residual_norm = 0.0;
    double rmse = 0.0;
    bool converged = false;
    std::size_t n_points = 0;
    std::size_t iterations = 0;

    friend bool operator==(const BassFit&, const BassFit&) = default;
};

/// Closed-form adopter fraction F(t) with F(0) = 0 and market size 1.
inline double cumulative(const Params& params, double t) {
    params.validate();
    if (!(t >= 0.0)) throw Error("Bass time must be non-negative");
    const double s = params.p + params.q;
    const double decay = std::exp(-s * t);
    return -std::expm1(-s * t) / (1.0 + (params.q / params.p) * decay);
}

/// Adoption rate f(t) = (p + q F(t)) (1 - F(t)), the time derivative of cumulative().
inline double instantaneous(const Params& params, double t) {
    params.validate();
    if (!(t >= 0.0)) throw Error("Bass time must be non-negative");
    const double s = params.p + params.q;
    const double ratio = params.q / params.p;
    const double decay = std::exp(-s * t);
    const double denom = 1.0 + ratio * decay;
    const double adopted = -std::expm1(-s * t) / denom;
    const double remaining = decay * (1.0 + ratio) / denom;
    return (params.p + params.q * adopted) * remaining;
}

/// dF/dp and dF/dq at time t.
inline std::array<double, 2> cumulative_gradient(const Params& params, double t) {
    const double p = params.p;
    const double q = params.q;
    const double ratio = q / p;
    const double decay = std::exp(-(p + q) * t);
    const double denom = 1.0 + ratio * decay;
    const double shared = t * decay * (1.0 + ratio);
    const double cross = -std::expm1(-(p + q) * t) * decay;
    const double d2 = denom * denom;
    return {(shared + cross * q / (p * p)) / d2, (shared - cross / p) / d2};
}

inline const std::array<double, 4> kGridP{0.001, 0.01, 0.03, 0.1};
inline const std::array<double, 4> kGridQ{0.01, 0.1, 0.38, 0.8};

struct FitOptions {
    numerics::NlsOptions solver{.max_iter = 500, .tol = 1e-12, .abs_tol = 1e-15, .initial_damping = 1e-3};
};

namespace detail {

inline numerics::NlsFit fit_from(std::span<const double> times, std::span<const double> observed,
                                 Params start, const FitOptions& options) {
    auto residual = [&](std::span<const double> theta) {
        std::vector<double> r(times.size());
        const Params prm{theta[0], theta[1]};
        for (std::size_t i = 0; i < times.size(); ++i) r[i] = cumulative(prm, times[i]) - observed[i];
        return r;
    };
    auto jacobian = [&](std::span<const double> theta) {
        numerics::Matrix jac(times.size(), 2);
        const Params prm{theta[0], theta[1]};
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto g = cumulative_gradient(prm, times[i]);
            jac(i, 0) = g[0];
            jac(i, 1) = g[1];
        }
        return jac;
    };
    const std::array<double, 2> init{start.p, start.q};
    const numerics::Bounds bounds{{kMinP, kMinQ}, {kMaxP, kMaxQ}};
    return numerics::damped_least_squares(residual, jacobian, init, bounds, options.solver);
}

}  // namespace detail

/// Least-squares fit of (p, q) to an observed cumulative-fraction curve.
/// Every point of the start grid is refined; the smallest residual wins.
inline BassFit fit_cumulative(std::span<const double> times, std::span<const double> observed,
                              const FitOptions& options = {}) {
    if (times.size() != observed.size()) throw Error("times and observations differ in length");
    if (times.empty()) throw Error("unfittable series");

    std::optional<numerics::NlsFit> best;
    for (double p0 : kGridP) {
        for (double q0 : kGridQ) {
            try {
                auto fit = detail::fit_from(times, observed, {p0, q0}, options);
                if (!best || fit.residual_norm < best->residual_norm) best = std::move(fit);
            } catch (const Error&) {
                // non-finite residual at this start; try the others
            }
        }
    }
    if (!best) throw Error("unfittable series");

    BassFit out;
    out.params = {best->params[0], best->params[1]};
    out.residual_norm = best->residual_norm;
    out.n_points = times.size();
    out.rmse = best->residual_norm / std::sqrt(static_cast<double>(times.size()));
    out.converged = best->converged;
    out.iterations = best->iterations;
    return out;
}

/// Time of each sample: days since the series start, measured at the end of the
/// sample's day, so the cumulative fraction of day i pairs with F(i + 1).
inline std::vector<double> sample_times(const TimeSeries& series) {
    std::vector<double> t(series.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<double>(series.dates()[i] - series.first_date() + 1);
    return t;
}

/// Normalises daily popularity to cumulative fractions and fits (p, q).
inline BassFit fit_bass(const TimeSeries& series, Platform platform = Platform::short_video,
                        const FitOptions& options = {}) {
    const auto cum = cumulative_normalized(series);
    const auto times = sample_times(series);
    auto fit = fit_cumulative(times, cum.values(), options);
    fit.platform = platform;
    return fit;
}

/// Daily values whose cumulative fractions follow the model exactly: the value
/// on day i is F(i + 1) - F(i).
inline TimeSeries generate_daily(const Params& params, Day first, std::size_t days) {
    std::vector<double> values(days);
    for (std::size_t i = 0; i < days; ++i)
        values[i] = cumulative(params, static_cast<double>(i + 1)) - cumulative(params, static_cast<double>(i));
    return TimeSeries::daily(first, std::move(values));
}

struct BatchEntry {
    std::string song_id;
    std::optional<BassFit> short_video;
    std::optional<BassFit> web_search;
    std::string error;

    friend bool operator==(const BatchEntry&, const BatchEntry&) = default;
};

/// Two independent fits per record, in input order. Failures are recorded per record.
inline std::vector<BatchEntry> batch_bass(std::span<const SongRecord> records, const FitOptions& options = {}) {
    std::vector<BatchEntry> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        BatchEntry entry{rec.song_id, std::nullopt, std::nullopt, {}};
        try {
            entry.short_video = fit_bass(rec.short_video_series, Platform::short_video, options);
            if (!rec.web_search_series) throw Error("missing web-search series");
            entry.web_search = fit_bass(*rec.web_search_series, Platform::web_search, options);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace revival::bass
