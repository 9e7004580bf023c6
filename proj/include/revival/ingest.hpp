#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "day.hpp"
#include "error.hpp"
#include "json.hpp"
#include "record.hpp"
#include "series.hpp"

namespace revival::ingest {

namespace fs = std::filesystem;

/// Non-blank, non-comment line of a text file with its 1-based line number.
struct SourceLine {
    std::size_t number;
    std::string text;
};

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::vector<SourceLine> content_lines(const std::string& text) {
    std::vector<SourceLine> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string::npos ? text.size() : nl;
        ++number;
        const auto line = csv::trim(std::string_view(text).substr(pos, end - pos));
        if (!line.empty() && line.front() != '#') out.push_back({number, std::string(line)});
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_or_throw(const std::string& path, const SourceLine& line) {
    auto fields = csv::split_line(line.text);
    if (!fields) throw ParseError(path, line.number, "unterminated quoted field");
    for (auto& f : *fields) f = std::string(csv::trim(f));
    return *fields;
}

inline void expect_header(const std::string& path, const std::vector<SourceLine>& lines,
                          const std::vector<std::string>& header) {
    if (lines.empty()) throw ParseError(path, 1, "missing header");
    if (split_or_throw(path, lines.front()) != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ParseError(path, lines.front().number, "expected header '" + want + "'");
    }
}

}  // namespace detail

/// Parses a `date,value` file. Rows may appear in any order and are sorted by date.
inline TimeSeries parse_series_text(const std::string& text, const std::string& path) {
    const auto lines = content_lines(text);
    detail::expect_header(path, lines, {"date", "value"});

    struct Row {
        Day date;
        double value;
        std::size_t line;
    };
    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::split_or_throw(path, lines[i]);
        if (fields.size() != 2) throw ParseError(path, lines[i].number, "expected 2 fields");
        const auto date = try_parse_iso_date(fields[0]);
        if (!date) throw ParseError(path, lines[i].number, "malformed date '" + fields[0] + "'");
        const auto value = csv::parse_double(fields[1]);
        if (!value || !std::isfinite(*value) || *value < 0.0)
            throw ParseError(path, lines[i].number, "malformed value '" + fields[1] + "'");
        rows.push_back({*date, *value, lines[i].number});
    }
    if (rows.empty()) throw ParseError(path, lines.front().number, "no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            const auto [first, second] = std::minmax(rows[i - 1].line, rows[i].line);
            throw ParseError(path, second,
                             "duplicate date " + format_iso_date(rows[i].date) + " (also on line " +
                                 std::to_string(first) + ")");
        }
    }
    std::vector<Day> dates;
    std::vector<double> values;
    for (const auto& r : rows) {
        dates.push_back(r.date);
        values.push_back(r.value);
    }
    return TimeSeries(std::move(dates), std::move(values));
}

inline TimeSeries parse_series_file(const fs::path& path) {
    return parse_series_text(read_text(path), path.string());
}

/// Text form of a series; values are written so they parse back bit-identically.
inline std::string format_series(const TimeSeries& series) {
    std::string out = "date,value\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out += format_iso_date(series.dates()[i]) + "," + csv::format_exact(series.values()[i]) + "\n";
    return out;
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error("cannot write '" + path.string() + "'");
}

inline void write_series_file(const fs::path& path, const TimeSeries& series) {
    write_text(path, format_series(series));
}

inline ReleaseKind parse_release_kind(std::string_view text) {
    if (text == "single") return ReleaseKind::single;
    if (text == "album") return ReleaseKind::album;
    if (text == "other") return ReleaseKind::other;
    throw Error("unknown release kind '" + std::string(text) + "'");
}

/// Catalog file with header `title,artist,release_date,release_kind`.
inline std::vector<CatalogEntry> parse_catalog_text(const std::string& text, const std::string& path) {
    const auto lines = content_lines(text);
    detail::expect_header(path, lines, {"title", "artist", "release_date", "release_kind"});
    std::vector<CatalogEntry> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::split_or_throw(path, lines[i]);
        const auto number = lines[i].number;
        if (fields.size() != 4) throw ParseError(path, number, "expected 4 fields");
        if (fields[0].empty() || fields[1].empty()) throw ParseError(path, number, "empty title or artist");
        const auto date = try_parse_iso_date(fields[2]);
        if (!date) throw ParseError(path, number, "malformed date '" + fields[2] + "'");
        try {
            out.push_back({fields[0], fields[1], *date, parse_release_kind(fields[3])});
        } catch (const Error& e) {
            throw ParseError(path, number, e.what());
        }
    }
    return out;
}

inline std::vector<CatalogEntry> parse_catalog_file(const fs::path& path) {
    return parse_catalog_text(read_text(path), path.string());
}

/// One song identifier per line; blank lines and `#` comments ignored.
inline std::vector<std::string> parse_allowlist_file(const fs::path& path) {
    std::vector<std::string> out;
    for (auto& line : content_lines(read_text(path))) out.push_back(std::move(line.text));
    return out;
}

inline constexpr int kManifestVersion = 1;

struct ManifestEntry {
    std::string song_id;
    std::string display_title;
    std::string short_video_path;
    std::optional<std::string> web_search_path;
    bool manual = false;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    int format_version = kManifestVersion;
    std::vector<ManifestEntry> songs;
};

/// JSON manifest: `{"format_version": 1, "songs": [{"song_id", "display_title",
/// "short_video", "web_search"?, "manual"?}]}`. Paths are relative to the manifest.
inline DatasetManifest parse_manifest(const fs::path& path) {
    const std::string text = read_text(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("manifest '" + path.string() + "': " + e.what());
    }
    DatasetManifest out;
    try {
        out.format_version = doc.at("format_version").get<int>();
        if (out.format_version != kManifestVersion)
            throw Error("unsupported format_version " + std::to_string(out.format_version));
        std::set<std::string> ids;
        for (const auto& song : doc.at("songs")) {
            ManifestEntry e;
            e.song_id = song.at("song_id").get<std::string>();
            if (e.song_id.empty()) throw Error("empty song_id");
            if (!ids.insert(e.song_id).second)
                throw Error("duplicate song identifier '" + e.song_id + "'");
            e.display_title = song.at("display_title").get<std::string>();
            e.short_video_path = song.at("short_video").get<std::string>();
            if (auto it = song.find("web_search"); it != song.end() && !it->is_null())
                e.web_search_path = it->get<std::string>();
            if (auto it = song.find("manual"); it != song.end()) e.manual = it->get<bool>();
            out.songs.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("manifest '" + path.string() + "': " + e.what());
    } catch (const Error& e) {
        throw Error("manifest '" + path.string() + "': " + e.what());
    }
    return out;
}

inline std::string format_manifest(const DatasetManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["format_version"] = manifest.format_version;
    doc["songs"] = nlohmann::ordered_json::array();
    for (const auto& e : manifest.songs) {
        nlohmann::ordered_json song;
        song["song_id"] = e.song_id;
        song["display_title"] = e.display_title;
        song["short_video"] = e.short_video_path;
        song["web_search"] = e.web_search_path ? nlohmann::ordered_json(*e.web_search_path)
                                               : nlohmann::ordered_json(nullptr);
        if (e.manual) song["manual"] = true;
        doc["songs"].push_back(std::move(song));
    }
    return doc.dump(2) + "\n";
}

/// Loads every series referenced by the manifest. A web-search path that is
/// absent, or names a file that does not exist, yields a record without that series.
inline std::vector<SongRecord> load_dataset(const fs::path& manifest_path) {
    const auto manifest = parse_manifest(manifest_path);
    const auto base = manifest_path.parent_path();
    std::vector<SongRecord> out;
    out.reserve(manifest.songs.size());
    for (const auto& e : manifest.songs) {
        try {
            SongRecord rec{e.song_id, e.display_title, parse_series_file(base / e.short_video_path),
                           std::nullopt, std::nullopt, e.manual};
            if (e.web_search_path && fs::exists(base / *e.web_search_path))
                rec.web_search_series = parse_series_file(base / *e.web_search_path);
            out.push_back(std::move(rec));
        } catch (const Error& err) {
            throw Error("song '" + e.song_id + "': " + err.what());
        }
    }
    return out;
}

}  // namespace revival::ingest
