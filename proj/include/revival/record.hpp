#pragma once

#include <optional>
#include <string>

#include "day.hpp"
#include "series.hpp"

namespace revival {

enum class ReleaseKind { single, album, other };

/// One release from the local music catalog.
struct CatalogEntry {
    std::string title;
    std::string artist;
    Day release_date;
    ReleaseKind release_kind = ReleaseKind::other;

    friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

/// Paired short-video and web-search popularity for one song.
struct SongRecord {
    std::string song_id;
    /// Combined "Title by Artist" label as shown on the short-video chart.
    std::string display_title;
    TimeSeries short_video_series;
    std::optional<TimeSeries> web_search_series;
    std::optional<CatalogEntry> catalog;
    bool manual = false;

    friend bool operator==(const SongRecord&, const SongRecord&) = default;
};

inline const char* to_string(ReleaseKind kind) {
    switch (kind) {
        case ReleaseKind::single: return "single";
        case ReleaseKind::album: return "album";
        case ReleaseKind::other: return "other";
    }
    return "other";
}

}  // namespace revival
