#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "day.hpp"
#include "error.hpp"
#include "fuzzy.hpp"
#include "record.hpp"
#include "series.hpp"

namespace revival::curation {

struct CatalogMatch {
    CatalogEntry entry;
    int title_score = 0;
    int artist_score = 0;
};

/// Best catalog entry whose title and artist both score strictly above
/// `threshold` against the combined display title.
inline std::optional<CatalogMatch> match_catalog(const SongRecord& record,
                                                 std::span<const CatalogEntry> catalog,
                                                 int threshold = 50) {
    if (threshold < 0 || threshold > 100) throw Error("match threshold must lie in [0, 100]");
    std::optional<CatalogMatch> best;
    for (const auto& entry : catalog) {
        const int title = fuzzy::partial_ratio(entry.title, record.display_title);
        const int artist = fuzzy::partial_ratio(entry.artist, record.display_title);
        if (title <= threshold || artist <= threshold) continue;
        CatalogMatch cand{entry, title, artist};
        if (!best) {
            best = std::move(cand);
            continue;
        }
        const int cand_score = std::min(title, artist);
        const int best_score = std::min(best->title_score, best->artist_score);
        if (cand_score != best_score) {
            if (cand_score > best_score) best = std::move(cand);
        } else if (entry.release_date != best->entry.release_date) {
            if (entry.release_date < best->entry.release_date) best = std::move(cand);
        } else if (entry.title < best->entry.title) {
            best = std::move(cand);
        }
    }
    return best;
}

/// Funnel stages in pipeline order. A record dropped at a stage never reaches
/// the stages after it.
enum class Stage {
    web_search_present,
    catalog_match,
    single_release,
    release_date,
    peak_window,
    min_points,
};

inline constexpr std::array<Stage, 6> kStages{Stage::web_search_present, Stage::catalog_match,
                                              Stage::single_release,     Stage::release_date,
                                              Stage::peak_window,        Stage::min_points};

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::web_search_present: return "web_search_present";
        case Stage::catalog_match: return "catalog_match";
        case Stage::single_release: return "single_release";
        case Stage::release_date: return "release_date";
        case Stage::peak_window: return "peak_window";
        case Stage::min_points: return "min_points";
    }
    return "unknown";
}

struct Decision {
    std::string song_id;
    /// Last stage evaluated: the failing stage when dropped, min_points when kept.
    Stage stage = Stage::web_search_present;
    bool kept = false;
    std::string reason;

    friend bool operator==(const Decision&, const Decision&) = default;
};

struct Report {
    std::vector<Decision> decisions;
    std::size_t input_count = 0;
    /// Records surviving each stage, indexed like kStages.
    std::array<std::size_t, kStages.size()> survivors{};

    std::size_t kept_count() const noexcept { return survivors.back(); }
};

struct Options {
    Day cutoff_date = Day{17074};  // 2016-09-30
    std::size_t min_points = 20;
    int match_threshold = 50;
    double peak_threshold = 0.05;
    ThresholdBasis peak_basis = ThresholdBasis::total;
};

struct Result {
    std::vector<SongRecord> kept;
    Report report;
};

/// Interpolates both series, windows the short-video series around its peak,
/// and restricts the web-search series to the same days.
inline std::pair<TimeSeries, TimeSeries> window_pair(const TimeSeries& short_video,
                                                     const TimeSeries& web_search,
                                                     const Options& options) {
    const auto sv = interpolate_daily(short_video);
    const auto ws = interpolate_daily(web_search);
    const auto w = peak_window(sv, options.peak_threshold, options.peak_basis);
    return align_pair(sv.slice(w.start, w.end), ws);
}

inline Result curate(std::span<const SongRecord> records, std::span<const CatalogEntry> catalog,
                     std::span<const std::string> allowlist, const Options& options = {}) {
    {
        std::set<std::string_view> seen;
        for (const auto& r : records)
            if (!seen.insert(r.song_id).second)
                throw Error("duplicate song identifier '" + r.song_id + "'");
    }
    const std::unordered_set<std::string> allowed(allowlist.begin(), allowlist.end());

    Result out;
    out.report.input_count = records.size();
    for (const auto& input : records) {
        SongRecord rec = input;
        const bool manual = allowed.contains(rec.song_id);
        rec.manual = manual;
        Decision decision{rec.song_id, Stage::web_search_present, false, {}};
        auto drop = [&](Stage stage, std::string reason) {
            decision.stage = stage;
            decision.reason = std::move(reason);
        };
        auto survive = [&](Stage stage) {
            ++out.report.survivors[static_cast<std::size_t>(stage)];
        };

        if (!rec.web_search_series) {
            drop(Stage::web_search_present, "no web-search series");
        } else {
            survive(Stage::web_search_present);
            if (auto m = match_catalog(rec, catalog, options.match_threshold)) rec.catalog = m->entry;

            if (!rec.catalog && !manual) {
                drop(Stage::catalog_match, "no catalog entry above match threshold");
            } else if (survive(Stage::catalog_match);
                       !manual && rec.catalog->release_kind != ReleaseKind::single) {
                drop(Stage::single_release,
                     std::string("release kind is ") + to_string(rec.catalog->release_kind));
            } else if (survive(Stage::single_release);
                       !manual && rec.catalog->release_date > options.cutoff_date) {
                drop(Stage::release_date,
                     "released " + format_iso_date(rec.catalog->release_date) + " after cutoff " +
                         format_iso_date(options.cutoff_date));
            } else {
                survive(Stage::release_date);
                try {
                    auto [sv, ws] = window_pair(rec.short_video_series, *rec.web_search_series, options);
                    survive(Stage::peak_window);
                    const std::size_t shortest = std::min(sv.size(), ws.size());
                    if (shortest < options.min_points) {
                        drop(Stage::min_points, "windowed series has " + std::to_string(shortest) +
                                                    " points, fewer than " +
                                                    std::to_string(options.min_points));
                    } else {
                        survive(Stage::min_points);
                        rec.short_video_series = std::move(sv);
                        rec.web_search_series = std::move(ws);
                        decision.stage = Stage::min_points;
                        decision.kept = true;
                        decision.reason = manual ? "kept (allowlisted)" : "kept";
                        out.kept.push_back(std::move(rec));
                    }
                } catch (const Error& e) {
                    drop(Stage::peak_window, e.what());
                }
            }
        }
        out.report.decisions.push_back(std::move(decision));
    }
    return out;
}

}  // namespace revival::curation
