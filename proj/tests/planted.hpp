#pragma once

// Ten planted records with a known curation outcome at every stage.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "revival/curation.hpp"

namespace planted {

using namespace revival;
using revival::curation::Options;

inline CatalogEntry entry(std::string title, std::string artist, const char* date, ReleaseKind kind = ReleaseKind::single) {
    return {std::move(title), std::move(artist), parse_iso_date(date), kind};
}

/// Unimodal daily curve of `days` points peaking mid-way.
inline TimeSeries bump(std::size_t days, double height = 1000.0, Day start = parse_iso_date("2021-03-01")) {
    std::vector<double> v(days);
    for (std::size_t i = 0; i < days; ++i) {
        const double z = (static_cast<double>(i) - days / 2.0) / (days / 6.0);
        v[i] = height * std::exp(-0.5 * z * z) + 1.0;
    }
    return TimeSeries::daily(start, v);
}

inline SongRecord song(std::string id, std::string title, std::optional<TimeSeries> ws, TimeSeries sv = bump(60)) {
    return {std::move(id), std::move(title), std::move(sv), std::move(ws), std::nullopt, false};
}

inline const std::vector<CatalogEntry> kCatalog{
    entry("Where Is the Love?", "The Black Eyed Peas", "2003-06-16"),
    entry("Dreams", "Fleetwood Mac", "1977-02-04"),
    entry("How Bizarre", "OMC", "1995-11-01"),
    entry("PYRO", "Chester Young & Castion", "2019-07-01"),
    entry("Album Cut", "Some Band", "2001-01-01", ReleaseKind::album),
    entry("Late Single", "Night Owls", "2016-10-01"),
    entry("Short Hit", "Brief", "2005-05-05"),
};

/// Ten records with planted failures at every stage.
inline std::vector<SongRecord> planted_fixture() {
    // web-search series sampled weekly (interpolated during curation)
    std::vector<Day> weekly;
    std::vector<double> wv;
    for (int w = 0; w < 12; ++w) {
        weekly.push_back(parse_iso_date("2021-02-22") + 7 * w);
        wv.push_back(10.0 + 5.0 * w);
    }
    const TimeSeries ws(weekly, wv);
    return {
        song("love", "Where Is the Love? by The Black Eyed Peas", ws),
        song("dreams", "Dreams by Fleetwood Mac", ws),
        song("bizarre", "How Bizarre by OMC", ws),
        song("no_trends", "Dreams by Fleetwood Mac", std::nullopt),                 // stage 1
        song("unknown", "Totally Different Tune by Nobody", ws),                   // stage 2
        song("album", "Album Cut by Some Band", ws),                               // stage 3
        song("pyro", "PYRO by Chester Young & Castion", ws),                       // stage 4
        song("late", "Late Single by Night Owls", ws),                             // stage 4 (one day late)
        song("short", "Short Hit by Brief", ws, bump(12)),                         // stage 6
        song("manual", "Unlisted Revival by Garage Act", ws),                      // allowlisted, kept
    };
}

inline Options peak_basis() {
    Options o;
    o.peak_basis = ThresholdBasis::peak;
    return o;
}


/// Survivors after each stage for planted_fixture() with {"manual"} allowlisted and peak_basis().
inline constexpr std::array<std::size_t, 6> kExpectedSurvivors{9, 8, 7, 5, 5, 4};

}  // namespace planted
