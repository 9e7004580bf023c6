#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bass.hpp"
#include "curation.hpp"
#include "day.hpp"
#include "error.hpp"
#include "granger.hpp"
#include "ingest.hpp"
#include "report.hpp"
#include "series.hpp"

namespace revival::pipeline {

namespace fs = std::filesystem;

/// Settings shared by every command. Defaults are the published analysis constants.
struct RunConfig {
    std::optional<fs::path> manifest;
    std::optional<fs::path> catalog;
    std::optional<fs::path> allowlist;
    Day cutoff_date = parse_iso_date("2016-09-30");
    std::size_t min_points = 20;
    double peak_threshold = 0.05;
    ThresholdBasis peak_basis = ThresholdBasis::total;
    int match_threshold = 50;
    int lag_min = 1;
    int lag_max = 5;
    double alpha = 0.1;
    bool bonferroni = false;
    double bass_rmse_max = 0.05;
    fs::path out_dir = ".";
    report::Format format = report::Format::jsonl;

    void validate() const {
        if (min_points < 1) throw Error("--min-points must be at least 1");
        if (!(peak_threshold > 0.0 && peak_threshold < 1.0)) throw Error("--peak-threshold must lie in (0, 1)");
        if (match_threshold < 0 || match_threshold > 100) throw Error("--match-threshold must lie in [0, 100]");
        if (lag_min < 1 || lag_max < lag_min) throw Error("--lag-min/--lag-max must satisfy 1 <= min <= max");
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error("--alpha must lie in (0, 1)");
        if (!(bass_rmse_max > 0.0)) throw Error("--bass-rmse-max must be positive");
    }

    curation::Options curation_options() const {
        return {cutoff_date, min_points, match_threshold, peak_threshold, peak_basis};
    }

    granger::Options granger_options() const {
        return {{lag_min, lag_max}, alpha,
                bonferroni ? granger::Correction::bonferroni : granger::Correction::none, min_points};
    }
};

inline const char* kCuratedManifest = "curate_manifest.json";
inline const char* kCuratedSeriesDir = "curate_series";

namespace detail {

inline const fs::path& require(const std::optional<fs::path>& p, const char* flag, const char* command) {
    if (!p) throw Error(std::string(flag) + " is required for " + command);
    return *p;
}

inline fs::path output(const RunConfig& c, const std::string& name) { return c.out_dir / name; }

inline std::string report_name(const RunConfig& c, const std::string& stem) {
    return stem + "." + report::extension(c.format);
}

inline std::string file_safe(const std::string& id) {
    std::string out;
    for (char ch : id) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '-' || ch == '_' || ch == '.';
        out.push_back(ok ? ch : '_');
    }
    return out;
}

template <class Body>
int guarded(const char* command, std::ostream& err, Body&& body) {
    try {
        body();
        return 0;
    } catch (const std::exception& e) {
        err << command << ": error: " << e.what() << "\n";
        return 1;
    }
}

inline std::string percent(std::size_t part, std::size_t whole) {
    if (whole == 0) return "0%";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * static_cast<double>(part) / static_cast<double>(whole));
    return buf;
}

}  // namespace detail

/// Runs the dataset funnel and writes the kept records as a new manifest.
inline int run_curate(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded("curate", err, [&] {
        config.validate();
        const auto& manifest = detail::require(config.manifest, "--manifest", "curate");
        const auto& catalog_path = detail::require(config.catalog, "--catalog", "curate");
        const auto records = ingest::load_dataset(manifest);
        const auto catalog = ingest::parse_catalog_file(catalog_path);
        std::vector<std::string> allowlist;
        if (config.allowlist) allowlist = ingest::parse_allowlist_file(*config.allowlist);

        const auto result = curation::curate(records, catalog, allowlist, config.curation_options());

        fs::create_directories(config.out_dir / kCuratedSeriesDir);
        ingest::DatasetManifest kept;
        for (std::size_t i = 0; i < result.kept.size(); ++i) {
            const auto& rec = result.kept[i];
            char prefix[16];
            std::snprintf(prefix, sizeof prefix, "%03zu_", i);
            const std::string stem = std::string(kCuratedSeriesDir) + "/" + prefix + detail::file_safe(rec.song_id);
            const std::string sv = stem + ".short_video.csv";
            const std::string ws = stem + ".web_search.csv";
            ingest::write_series_file(config.out_dir / sv, rec.short_video_series);
            ingest::write_series_file(config.out_dir / ws, *rec.web_search_series);
            kept.songs.push_back({rec.song_id, rec.display_title, sv, ws, rec.manual});
        }
        ingest::write_text(detail::output(config, kCuratedManifest), ingest::format_manifest(kept));
        ingest::write_text(detail::output(config, detail::report_name(config, "curate_report")),
                           report::format_curation(result.report, config.format));
        ingest::write_text(detail::output(config, detail::report_name(config, "curate_funnel")),
                           report::format_funnel(result.report, config.format));

        out << "curate: input " << result.report.input_count;
        for (std::size_t i = 0; i < curation::kStages.size(); ++i)
            out << ", " << curation::to_string(curation::kStages[i]) << " " << result.report.survivors[i];
        out << "\ncurate: kept " << result.report.kept_count() << " of " << result.report.input_count << "\n";
    });
}

/// Granger test of short-video -> web-search popularity for every record in the manifest.
inline int run_granger(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded("granger", err, [&] {
        config.validate();
        const auto records = ingest::load_dataset(detail::require(config.manifest, "--manifest", "granger"));
        const auto batch = granger::batch_granger(records, config.granger_options());

        fs::create_directories(config.out_dir);
        ingest::write_text(detail::output(config, detail::report_name(config, "granger_results")),
                           report::format_granger(batch, config.format));
        ingest::write_text(detail::output(config, "granger_histogram.csv"), report::format_p_histogram(batch));

        out << "granger: " << batch.tested << " tested, " << batch.causal << " causal at alpha "
            << csv::format_sig12(config.alpha) << " (" << detail::percent(batch.causal, batch.tested) << "), "
            << batch.failed << " failed\n";
    });
}

/// Bass fits on both platforms for the records the Granger test flags as causal.
inline int run_bass(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded("bass", err, [&] {
        config.validate();
        const auto records = ingest::load_dataset(detail::require(config.manifest, "--manifest", "bass"));
        const auto verdicts = granger::batch_granger(records, config.granger_options());
        std::vector<SongRecord> causal;
        for (std::size_t i = 0; i < records.size(); ++i)
            if (verdicts.entries[i].result && verdicts.entries[i].result->causal) causal.push_back(records[i]);

        const auto fits = bass::batch_bass(causal);

        std::string overlay = report::kOverlayHeader;
        std::size_t n_fits = 0, n_ok = 0;
        for (std::size_t i = 0; i < fits.size(); ++i) {
            const auto& e = fits[i];
            if (e.short_video) {
                overlay += report::format_bass_overlay(e.song_id, causal[i].short_video_series, *e.short_video);
                ++n_fits;
                n_ok += e.short_video->rmse <= config.bass_rmse_max;
            }
            if (e.web_search) {
                overlay += report::format_bass_overlay(e.song_id, *causal[i].web_search_series, *e.web_search);
                ++n_fits;
                n_ok += e.web_search->rmse <= config.bass_rmse_max;
            }
        }

        fs::create_directories(config.out_dir);
        ingest::write_text(detail::output(config, detail::report_name(config, "bass_fits")),
                           report::format_bass(fits, config.format, config.bass_rmse_max));
        ingest::write_text(detail::output(config, "bass_scatter.csv"), report::format_bass_scatter(fits));
        ingest::write_text(detail::output(config, "bass_overlay.csv"), overlay);

        out << "bass: " << causal.size() << " causal songs, " << n_fits << " fits, " << n_ok
            << " with rmse <= " << csv::format_sig12(config.bass_rmse_max) << "\n";
    });
}

struct PopularitySummary {
    std::size_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

inline PopularitySummary summarize(std::span<const double> totals) {
    return {totals.size(),
            quantile(totals, 0.0),
            quantile(totals, 0.25),
            quantile(totals, 0.5),
            quantile(totals, 0.75),
            quantile(totals, 1.0)};
}

/// CCDF of per-song total short-video popularity.
inline int run_ccdf(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return detail::guarded("ccdf", err, [&] {
        config.validate();
        const auto records = ingest::load_dataset(detail::require(config.manifest, "--manifest", "ccdf"));
        std::vector<double> totals;
        for (const auto& r : records) totals.push_back(r.short_video_series.total());

        std::string points = "popularity,fraction_above\n";
        std::string summary;
        if (!totals.empty()) {
            for (const auto& p : ccdf(totals))
                points += csv::format_sig12(p.popularity) + "," + csv::format_sig12(p.fraction_above) + "\n";
            const auto s = summarize(totals);
            if (config.format == report::Format::csv) {
                summary = "count,min,q1,median,q3,max\n" + std::to_string(s.count) + "," +
                          csv::format_sig12(s.min) + "," + csv::format_sig12(s.q1) + "," +
                          csv::format_sig12(s.median) + "," + csv::format_sig12(s.q3) + "," +
                          csv::format_sig12(s.max) + "\n";
            } else {
                report::ordered_json j;
                j["count"] = s.count;
                j["min"] = report::detail::number(s.min);
                j["q1"] = report::detail::number(s.q1);
                j["median"] = report::detail::number(s.median);
                j["q3"] = report::detail::number(s.q3);
                j["max"] = report::detail::number(s.max);
                summary = j.dump() + "\n";
            }
            out << "ccdf: " << s.count << " songs, min " << csv::format_sig12(s.min) << ", q1 "
                << csv::format_sig12(s.q1) << ", median " << csv::format_sig12(s.median) << ", q3 "
                << csv::format_sig12(s.q3) << ", max " << csv::format_sig12(s.max) << "\n";
        } else {
            summary = config.format == report::Format::csv ? "count,min,q1,median,q3,max\n" : "";
            out << "ccdf: 0 songs\n";
        }
        fs::create_directories(config.out_dir);
        ingest::write_text(detail::output(config, "ccdf_points.csv"), points);
        ingest::write_text(detail::output(config, detail::report_name(config, "ccdf_summary")), summary);
    });
}

/// curate, then granger and bass on the curated manifest.
inline int run_pipeline(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    if (int rc = run_curate(config, out, err)) return rc;
    RunConfig staged = config;
    staged.manifest = config.out_dir / kCuratedManifest;
    if (int rc = run_granger(staged, out, err)) return rc;
    return run_bass(staged, out, err);
}

}  // namespace revival::pipeline
