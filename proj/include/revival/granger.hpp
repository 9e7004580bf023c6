#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numerics/matrix.hpp"
#include "numerics/ols.hpp"
#include "numerics/special.hpp"
#include "record.hpp"
#include "series.hpp"

namespace revival::granger {

/// Inclusive range of autoregressive lags to test.
struct LagSpec {
    int min_lag = 1;
    int max_lag = 5;

    void validate() const {
        if (min_lag < 1 || max_lag < min_lag) throw Error("lag range must satisfy 1 <= min <= max");
    }
};

enum class Correction { none, bonferroni };

struct Options {
    LagSpec lags;
    double alpha = 0.1;
    Correction correction = Correction::none;
    /// Shortest series accepted by granger_test.
    std::size_t min_points = 20;
};

/// Name of the test statistic written into every report.
inline constexpr const char* kStatistic = "ssr_f_test";

struct LagResult {
    int lag = 0;
    double f_stat = 0.0;
    int df_num = 0;
    int df_den = 0;
    double p_value = 1.0;
    double ssr_restricted = 0.0;
    double ssr_unrestricted = 0.0;

    friend bool operator==(const LagResult&, const LagResult&) = default;
};

struct GrangerResult {
    std::vector<LagResult> per_lag;
    double best_p = 1.0;
    int best_lag = 0;
    /// best_p after the configured multiple-comparison correction.
    double decision_p = 1.0;
    bool causal = false;
    double alpha = 0.1;
    Correction correction = Correction::none;
    bool intercept = true;

    friend bool operator==(const GrangerResult&, const GrangerResult&) = default;
};

struct LaggedDesign {
    numerics::Matrix design;
    std::vector<double> response;
};

/// Regression rows for t = lag .. n-1: optional intercept, target lags 1..lag,
/// then source lags 1..lag when a source is given.
inline LaggedDesign build_lagged_design(std::span<const double> target,
                                        std::optional<std::span<const double>> source, int lag,
                                        bool intercept = true) {
    if (lag < 1) throw Error("lag must be at least 1");
    const auto n = target.size();
    const auto L = static_cast<std::size_t>(lag);
    if (source && source->size() != n) throw Error("target and source differ in length");
    if (n <= L) throw Error("series too short for lag " + std::to_string(lag));

    const std::size_t rows = n - L;
    const std::size_t cols = (intercept ? 1 : 0) + L + (source ? L : 0);
    LaggedDesign out{numerics::Matrix(rows, cols), std::vector<double>(rows)};
    for (std::size_t row = 0; row < rows; ++row) {
        const std::size_t t = row + L;
        out.response[row] = target[t];
        std::size_t c = 0;
        if (intercept) out.design(row, c++) = 1.0;
        for (std::size_t l = 1; l <= L; ++l) out.design(row, c++) = target[t - l];
        if (source)
            for (std::size_t l = 1; l <= L; ++l) out.design(row, c++) = (*source)[t - l];
    }
    return out;
}

inline bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

/// SSR-based F test of whether lags of `source` improve prediction of `target`
/// beyond the target's own lags, for every lag in the configured range.
inline GrangerResult granger_test(std::span<const double> source, std::span<const double> target,
                                  const Options& options = {}) {
    options.lags.validate();
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    if (source.size() != target.size()) throw Error("source and target differ in length");
    if (target.size() < options.min_points)
        throw Error("series shorter than " + std::to_string(options.min_points) + " points");
    if (is_constant(source) || is_constant(target)) throw Error("degenerate (constant) series");

    GrangerResult result;
    result.alpha = options.alpha;
    result.correction = options.correction;
    for (int lag = options.lags.min_lag; lag <= options.lags.max_lag; ++lag) {
        // residual degrees of freedom of the unrestricted model must stay positive
        if (target.size() - lag <= static_cast<std::size_t>(2 * lag + 1))
            throw Error("series too short for lag " + std::to_string(lag));
        const auto restricted = build_lagged_design(target, std::nullopt, lag);
        const auto unrestricted = build_lagged_design(target, source, lag);
        const auto fit_r = numerics::ols_fit(restricted.design, restricted.response);
        const auto fit_u = numerics::ols_fit(unrestricted.design, unrestricted.response);

        LagResult lr;
        lr.lag = lag;
        lr.df_num = lag;
        lr.df_den = static_cast<int>(unrestricted.design.rows()) - 2 * lag - 1;
        lr.ssr_restricted = fit_r.ssr;
        lr.ssr_unrestricted = fit_u.ssr;
        const double gain = std::max(fit_r.ssr - fit_u.ssr, 0.0);
        if (fit_u.ssr > 0.0)
            lr.f_stat = (gain / lag) / (fit_u.ssr / lr.df_den);
        else
            lr.f_stat = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        lr.p_value = numerics::f_survival(lr.f_stat, lr.df_num, lr.df_den);
        result.per_lag.push_back(lr);
    }

    const auto best = std::min_element(result.per_lag.begin(), result.per_lag.end(),
                                       [](const auto& a, const auto& b) { return a.p_value < b.p_value; });
    result.best_p = best->p_value;
    result.best_lag = best->lag;
    result.decision_p = result.best_p;
    if (options.correction == Correction::bonferroni)
        result.decision_p = std::min(1.0, result.best_p * static_cast<double>(result.per_lag.size()));
    result.causal = result.decision_p < options.alpha;
    return result;
}

/// Overload for dated series; both must cover exactly the same days.
inline GrangerResult granger_test(const TimeSeries& source, const TimeSeries& target,
                                  const Options& options = {}) {
    if (!std::equal(source.dates().begin(), source.dates().end(), target.dates().begin(),
                    target.dates().end()))
        throw Error("source and target series are not aligned");
    return granger_test(source.values(), target.values(), options);
}

struct BatchEntry {
    std::string song_id;
    std::optional<GrangerResult> result;
    std::string error;

    friend bool operator==(const BatchEntry&, const BatchEntry&) = default;
};

struct BatchResult {
    std::vector<BatchEntry> entries;
    std::size_t tested = 0;
    std::size_t causal = 0;
    std::size_t failed = 0;
};

/// Short-video popularity as source, web-search popularity as target, one entry
/// per record in input order. Per-record failures are captured, not thrown.
inline BatchResult batch_granger(std::span<const SongRecord> records, const Options& options = {}) {
    BatchResult out;
    out.entries.reserve(records.size());
    for (const auto& rec : records) {
        BatchEntry entry{rec.song_id, std::nullopt, {}};
        try {
            if (!rec.web_search_series) throw Error("missing web-search series");
            entry.result = granger_test(rec.short_video_series, *rec.web_search_series, options);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        if (entry.result) {
            ++out.tested;
            if (entry.result->causal) ++out.causal;
        } else {
            ++out.failed;
        }
        out.entries.push_back(std::move(entry));
    }
    return out;
}

inline const char* to_string(Correction c) {
    return c == Correction::bonferroni ? "bonferroni" : "none";
}

}  // namespace revival::granger
