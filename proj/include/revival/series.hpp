#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "day.hpp"
#include "error.hpp"

namespace revival {

/// Ordered daily popularity samples for one song on one platform.
///
/// Dates are strictly increasing and every value is finite and non-negative.
/// Instances are immutable once constructed.
class TimeSeries {
public:
    TimeSeries(std::vector<Day> dates, std::vector<double> values)
        : dates_(std::move(dates)), values_(std::move(values)) {
        if (dates_.size() != values_.size())
            throw Error("time series dates and values differ in length");
        if (dates_.empty()) throw Error("time series must have at least one point");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]) || values_[i] < 0.0)
                throw Error("time series values must be finite and non-negative");
            if (i > 0 && !(dates_[i - 1] < dates_[i]))
                throw Error("time series dates must be strictly increasing");
        }
    }

    /// Consecutive days starting at `first`.
    static TimeSeries daily(Day first, std::vector<double> values) {
        std::vector<Day> dates(values.size());
        for (std::size_t i = 0; i < dates.size(); ++i)
            dates[i] = first + static_cast<std::int32_t>(i);
        return TimeSeries(std::move(dates), std::move(values));
    }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Day> dates() const noexcept { return dates_; }
    std::span<const double> values() const noexcept { return values_; }
    Day first_date() const noexcept { return dates_.front(); }
    Day last_date() const noexcept { return dates_.back(); }

    /// True when there is one sample for every day between first and last.
    bool is_daily_complete() const noexcept {
        return last_date() - first_date() + 1 == static_cast<std::int32_t>(size());
    }

    double total() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    /// Samples with index in [first, last].
    TimeSeries slice(std::size_t first, std::size_t last) const {
        if (first > last || last >= size()) throw Error("slice out of range");
        return TimeSeries({dates_.begin() + first, dates_.begin() + last + 1},
                          {values_.begin() + first, values_.begin() + last + 1});
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<Day> dates_;
    std::vector<double> values_;
};

/// Index range [start, end] around the peak of a series.
struct Window {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t peak = 0;

    std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const Window&, const Window&) = default;
};

enum class ThresholdBasis { total, peak };

struct CcdfPoint {
    double popularity = 0.0;
    double fraction_above = 0.0;
};

/// Fills every missing day by linear interpolation between the nearest
/// observed neighbours. Observed samples are copied unchanged.
inline TimeSeries interpolate_daily(const TimeSeries& series) {
    if (series.size() < 2) throw Error("insufficient data for interpolation");
    if (series.is_daily_complete()) return series;

    auto dates = series.dates();
    auto values = series.values();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(series.last_date() - series.first_date() + 1));
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        out.push_back(values[i]);
        const std::int32_t gap = dates[i + 1] - dates[i];
        for (std::int32_t k = 1; k < gap; ++k) {
            const double w = static_cast<double>(k) / gap;
            out.push_back(values[i] + (values[i + 1] - values[i]) * w);
        }
    }
    out.push_back(values.back());
    return TimeSeries::daily(series.first_date(), std::move(out));
}

/// Window around the (earliest) maximum, extended in both directions while
/// neighbouring values stay at or above `threshold_fraction` of the basis.
inline Window peak_window(const TimeSeries& series, double threshold_fraction = 0.05,
                          ThresholdBasis basis = ThresholdBasis::total) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw Error("threshold fraction must lie in (0, 1)");
    auto values = series.values();
    const auto peak_it = std::max_element(values.begin(), values.end());
    if (*peak_it <= 0.0) throw Error("degenerate series");

    const std::size_t peak = static_cast<std::size_t>(peak_it - values.begin());
    const double reference = basis == ThresholdBasis::total ? series.total() : *peak_it;
    const double threshold = threshold_fraction * reference;

    std::size_t start = peak;
    while (start > 0 && !(values[start - 1] < threshold)) --start;
    std::size_t end = peak;
    while (end + 1 < values.size() && !(values[end + 1] < threshold)) ++end;
    return Window{start, end, peak};
}

/// Restricts both series to their common dates.
inline std::pair<TimeSeries, TimeSeries> align_pair(const TimeSeries& a, const TimeSeries& b) {
    auto da = a.dates();
    auto db = b.dates();
    std::vector<Day> dates;
    std::vector<double> va, vb;
    std::size_t i = 0, j = 0;
    while (i < da.size() && j < db.size()) {
        if (da[i] < db[j]) {
            ++i;
        } else if (db[j] < da[i]) {
            ++j;
        } else {
            dates.push_back(da[i]);
            va.push_back(a.values()[i++]);
            vb.push_back(b.values()[j++]);
        }
    }
    if (dates.empty()) throw Error("no overlapping dates");
    return {TimeSeries(dates, std::move(va)), TimeSeries(dates, std::move(vb))};
}

/// Running sum divided by the total; the final value is exactly 1.
inline TimeSeries cumulative_normalized(const TimeSeries& series) {
    auto values = series.values();
    std::vector<double> cum(values.size());
    double running = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        running += values[i];
        cum[i] = running;
    }
    const double total = running;
    if (!(total > 0.0)) throw Error("degenerate series");
    for (double& c : cum) c /= total;
    cum.back() = 1.0;
    return TimeSeries({series.dates().begin(), series.dates().end()}, std::move(cum));
}

/// Empirical P(X > v) at each distinct observed value, ascending in v.
inline std::vector<CcdfPoint> ccdf(std::span<const double> values) {
    if (values.empty()) throw Error("ccdf of empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted)
        if (!std::isfinite(v) || v < 0.0) throw Error("ccdf values must be finite and non-negative");
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    std::vector<CcdfPoint> out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.push_back({sorted[i], static_cast<double>(sorted.size() - j) / n});
        i = j;
    }
    return out;
}

/// Linear-interpolation quantile (the common "type 7" definition).
inline double quantile(std::span<const double> values, double prob) {
    if (values.empty()) throw Error("quantile of empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error("quantile probability must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace revival
