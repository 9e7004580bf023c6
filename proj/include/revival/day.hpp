#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"

namespace revival {

/// Calendar day as an integer offset from 1970-01-01.
struct Day {
    std::int32_t offset = 0;

    constexpr Day() = default;
    constexpr explicit Day(std::int32_t days) : offset(days) {}

    friend constexpr auto operator<=>(Day, Day) = default;
    friend constexpr std::int32_t operator-(Day a, Day b) { return a.offset - b.offset; }
    friend constexpr Day operator+(Day d, std::int32_t n) { return Day{d.offset + n}; }
};

/// Strict ISO-8601 `YYYY-MM-DD`; returns nullopt on anything else.
inline std::optional<Day> try_parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            char c = text[i];
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
        }
        return v;
    };
    auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y},
                                    std::chrono::month{static_cast<unsigned>(*m)},
                                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Day{static_cast<std::int32_t>(
        std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

inline Day parse_iso_date(std::string_view text) {
    if (auto d = try_parse_iso_date(text)) return *d;
    throw Error("invalid ISO-8601 date '" + std::string(text) + "'");
}

inline std::string format_iso_date(Day day) {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day.offset}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace revival
