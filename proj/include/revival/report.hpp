#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bass.hpp"
#include "csv.hpp"
#include "curation.hpp"
#include "error.hpp"
#include "granger.hpp"
#include "ingest.hpp"
#include "json.hpp"

namespace revival::report {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum class Format { jsonl, csv };

inline const char* extension(Format f) { return f == Format::jsonl ? "jsonl" : "csv"; }

inline Format parse_format(std::string_view text) {
    if (text == "jsonl") return Format::jsonl;
    if (text == "csv") return Format::csv;
    throw Error("unknown report format '" + std::string(text) + "'");
}

namespace detail {

/// JSON number rounded to twelve significant digits; non-finite values become strings.
inline ordered_json number(double v) {
    if (!std::isfinite(v)) return csv::format_sig12(v);
    return *csv::parse_double(csv::format_sig12(v));
}

inline double to_double(const nlohmann::json& j) {
    if (j.is_string()) {
        if (auto v = csv::parse_number(j.get<std::string>())) return *v;
        throw Error("bad number '" + j.get<std::string>() + "' in report");
    }
    return j.get<double>();
}

inline std::string join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv::quote(fields[i]);
    }
    return line + "\n";
}

inline std::string num(double v) { return csv::format_sig12(v); }
inline std::string boolean(bool b) { return b ? "true" : "false"; }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
};

inline CsvTable read_csv(const std::string& text, const std::string& path) {
    CsvTable table;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string::npos ? text.size() : nl;
        ++number;
        auto fields = csv::split_line(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        if (!fields) throw ParseError(path, number, "unterminated quoted field");
        if (table.header.empty()) {
            table.header = *fields;
            continue;
        }
        if (fields->size() != table.header.size()) throw ParseError(path, number, "wrong field count");
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < fields->size(); ++i) row[table.header[i]] = (*fields)[i];
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline double field_num(const std::map<std::string, std::string>& row, const std::string& key) {
    if (auto v = csv::parse_number(row.at(key))) return *v;
    throw Error("bad number in column '" + key + "'");
}

inline int field_int(const std::map<std::string, std::string>& row, const std::string& key) {
    return static_cast<int>(field_num(row, key));
}

inline std::vector<nlohmann::json> read_jsonl(const std::string& text) {
    std::vector<nlohmann::json> out;
    for (const auto& line : ingest::content_lines(text)) out.push_back(nlohmann::json::parse(line.text));
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Granger results

inline const std::vector<std::string> kGrangerCsvHeader{
    "song_id", "status", "error",  "statistic", "intercept", "correction", "alpha",  "best_p",
    "best_lag", "decision_p", "causal", "lag", "f_stat", "df_num", "df_den", "p_value",
    "ssr_restricted", "ssr_unrestricted"};

inline std::string format_granger(const granger::BatchResult& batch, Format format) {
    std::string out;
    if (format == Format::csv) out += detail::join(kGrangerCsvHeader);
    for (const auto& e : batch.entries) {
        if (format == Format::jsonl) {
            ordered_json j;
            j["song_id"] = e.song_id;
            j["status"] = e.result ? "ok" : "error";
            if (!e.result) {
                j["error"] = e.error;
                out += j.dump() + "\n";
                continue;
            }
            const auto& r = *e.result;
            j["statistic"] = granger::kStatistic;
            j["intercept"] = r.intercept;
            j["correction"] = granger::to_string(r.correction);
            j["alpha"] = detail::number(r.alpha);
            j["best_p"] = detail::number(r.best_p);
            j["best_lag"] = r.best_lag;
            j["decision_p"] = detail::number(r.decision_p);
            j["causal"] = r.causal;
            j["per_lag"] = ordered_json::array();
            for (const auto& l : r.per_lag) {
                ordered_json lj;
                lj["lag"] = l.lag;
                lj["f_stat"] = detail::number(l.f_stat);
                lj["df_num"] = l.df_num;
                lj["df_den"] = l.df_den;
                lj["p_value"] = detail::number(l.p_value);
                lj["ssr_restricted"] = detail::number(l.ssr_restricted);
                lj["ssr_unrestricted"] = detail::number(l.ssr_unrestricted);
                j["per_lag"].push_back(std::move(lj));
            }
            out += j.dump() + "\n";
        } else if (!e.result) {
            out += detail::join({e.song_id, "error", e.error, "", "", "", "", "", "", "", "", "", "", "",
                                 "", "", "", ""});
        } else {
            const auto& r = *e.result;
            for (const auto& l : r.per_lag) {
                out += detail::join({e.song_id, "ok", "", granger::kStatistic, detail::boolean(r.intercept),
                                     granger::to_string(r.correction), detail::num(r.alpha),
                                     detail::num(r.best_p), std::to_string(r.best_lag),
                                     detail::num(r.decision_p), detail::boolean(r.causal),
                                     std::to_string(l.lag), detail::num(l.f_stat), std::to_string(l.df_num),
                                     std::to_string(l.df_den), detail::num(l.p_value),
                                     detail::num(l.ssr_restricted), detail::num(l.ssr_unrestricted)});
            }
        }
    }
    return out;
}

inline granger::BatchResult parse_granger(const std::string& text, Format format,
                                          const std::string& path = "<report>") {
    granger::BatchResult batch;
    auto tally = [&batch](const granger::BatchEntry& e) {
        if (e.result) {
            ++batch.tested;
            if (e.result->causal) ++batch.causal;
        } else {
            ++batch.failed;
        }
    };
    if (format == Format::jsonl) {
        for (const auto& j : detail::read_jsonl(text)) {
            granger::BatchEntry e{j.at("song_id").get<std::string>(), std::nullopt, {}};
            if (j.at("status") == "ok") {
                granger::GrangerResult r;
                r.intercept = j.at("intercept").get<bool>();
                r.correction = j.at("correction") == "bonferroni" ? granger::Correction::bonferroni
                                                                  : granger::Correction::none;
                r.alpha = detail::to_double(j.at("alpha"));
                r.best_p = detail::to_double(j.at("best_p"));
                r.best_lag = j.at("best_lag").get<int>();
                r.decision_p = detail::to_double(j.at("decision_p"));
                r.causal = j.at("causal").get<bool>();
                for (const auto& lj : j.at("per_lag")) {
                    r.per_lag.push_back({lj.at("lag").get<int>(), detail::to_double(lj.at("f_stat")),
                                         lj.at("df_num").get<int>(), lj.at("df_den").get<int>(),
                                         detail::to_double(lj.at("p_value")),
                                         detail::to_double(lj.at("ssr_restricted")),
                                         detail::to_double(lj.at("ssr_unrestricted"))});
                }
                e.result = std::move(r);
            } else {
                e.error = j.value("error", "");
            }
            tally(e);
            batch.entries.push_back(std::move(e));
        }
        return batch;
    }

    const auto table = detail::read_csv(text, path);
    for (const auto& row : table.rows) {
        const auto& id = row.at("song_id");
        const bool continues = !batch.entries.empty() && batch.entries.back().song_id == id &&
                               batch.entries.back().result && row.at("status") == "ok";
        if (!continues) {
            granger::BatchEntry e{id, std::nullopt, {}};
            if (row.at("status") == "ok") {
                granger::GrangerResult r;
                r.intercept = row.at("intercept") == "true";
                r.correction = row.at("correction") == "bonferroni" ? granger::Correction::bonferroni
                                                                    : granger::Correction::none;
                r.alpha = detail::field_num(row, "alpha");
                r.best_p = detail::field_num(row, "best_p");
                r.best_lag = detail::field_int(row, "best_lag");
                r.decision_p = detail::field_num(row, "decision_p");
                r.causal = row.at("causal") == "true";
                e.result = std::move(r);
            } else {
                e.error = row.at("error");
            }
            batch.entries.push_back(std::move(e));
        }
        if (auto& r = batch.entries.back().result) {
            r->per_lag.push_back({detail::field_int(row, "lag"), detail::field_num(row, "f_stat"),
                                  detail::field_int(row, "df_num"), detail::field_int(row, "df_den"),
                                  detail::field_num(row, "p_value"), detail::field_num(row, "ssr_restricted"),
                                  detail::field_num(row, "ssr_unrestricted")});
        }
    }
    for (const auto& e : batch.entries) tally(e);
    return batch;
}

/// Histogram of p-values over ten equal bins on [0, 1]: per-song minima and all (song, lag) pairs.
inline std::string format_p_histogram(const granger::BatchResult& batch) {
    constexpr int kBins = 10;
    std::vector<std::size_t> best(kBins, 0), all(kBins, 0);
    auto bin = [](double p) { return std::clamp(static_cast<int>(p * kBins), 0, kBins - 1); };
    for (const auto& e : batch.entries) {
        if (!e.result) continue;
        ++best[bin(e.result->best_p)];
        for (const auto& l : e.result->per_lag) ++all[bin(l.p_value)];
    }
    std::string out = "bin_lo,bin_hi,count_best_p,count_all_lags\n";
    for (int i = 0; i < kBins; ++i)
        out += detail::join({detail::num(i / double(kBins)), detail::num((i + 1) / double(kBins)),
                             std::to_string(best[i]), std::to_string(all[i])});
    return out;
}

// ---------------------------------------------------------------------------
// Bass fits

inline const std::vector<std::string> kBassCsvHeader{
    "song_id", "status", "error", "platform", "p", "q", "residual_norm", "rmse", "converged",
    "n_points", "iterations", "rmse_ok"};

inline std::string format_bass(std::span<const bass::BatchEntry> entries, Format format, double rmse_max) {
    std::string out;
    if (format == Format::csv) out += detail::join(kBassCsvHeader);
    auto fit_json = [&](const std::optional<bass::BassFit>& f) -> ordered_json {
        if (!f) return nullptr;
        ordered_json j;
        j["p"] = detail::number(f->params.p);
        j["q"] = detail::number(f->params.q);
        j["residual_norm"] = detail::number(f->residual_norm);
        j["rmse"] = detail::number(f->rmse);
        j["converged"] = f->converged;
        j["n_points"] = f->n_points;
        j["iterations"] = f->iterations;
        j["rmse_ok"] = f->rmse <= rmse_max;
        return j;
    };
    auto fit_row = [&](const std::string& id, const bass::BassFit& f) {
        return detail::join({id, "ok", "", bass::to_string(f.platform), detail::num(f.params.p),
                             detail::num(f.params.q), detail::num(f.residual_norm), detail::num(f.rmse),
                             detail::boolean(f.converged), std::to_string(f.n_points),
                             std::to_string(f.iterations), detail::boolean(f.rmse <= rmse_max)});
    };
    for (const auto& e : entries) {
        const bool ok = e.error.empty();
        if (format == Format::jsonl) {
            ordered_json j;
            j["song_id"] = e.song_id;
            j["status"] = ok ? "ok" : "error";
            if (!ok) j["error"] = e.error;
            j["rmse_max"] = detail::number(rmse_max);
            j["short_video"] = fit_json(e.short_video);
            j["web_search"] = fit_json(e.web_search);
            out += j.dump() + "\n";
        } else {
            if (e.short_video) out += fit_row(e.song_id, *e.short_video);
            if (e.web_search) out += fit_row(e.song_id, *e.web_search);
            if (!ok) out += detail::join({e.song_id, "error", e.error, "", "", "", "", "", "", "", "", ""});
        }
    }
    return out;
}

inline std::vector<bass::BatchEntry> parse_bass(const std::string& text, Format format,
                                                const std::string& path = "<report>") {
    std::vector<bass::BatchEntry> out;
    if (format == Format::jsonl) {
        auto fit = [](const nlohmann::json& j, bass::Platform platform) -> std::optional<bass::BassFit> {
            if (j.is_null()) return std::nullopt;
            bass::BassFit f;
            f.platform = platform;
            f.params = {detail::to_double(j.at("p")), detail::to_double(j.at("q"))};
            f.residual_norm = detail::to_double(j.at("residual_norm"));
            f.rmse = detail::to_double(j.at("rmse"));
            f.converged = j.at("converged").get<bool>();
            f.n_points = j.at("n_points").get<std::size_t>();
            f.iterations = j.at("iterations").get<std::size_t>();
            return f;
        };
        for (const auto& j : detail::read_jsonl(text)) {
            out.push_back({j.at("song_id").get<std::string>(),
                           fit(j.at("short_video"), bass::Platform::short_video),
                           fit(j.at("web_search"), bass::Platform::web_search), j.value("error", "")});
        }
        return out;
    }
    const auto table = detail::read_csv(text, path);
    for (const auto& row : table.rows) {
        const auto& id = row.at("song_id");
        if (out.empty() || out.back().song_id != id) out.push_back({id, std::nullopt, std::nullopt, {}});
        auto& e = out.back();
        if (row.at("status") != "ok") {
            e.error = row.at("error");
            continue;
        }
        bass::BassFit f;
        f.platform = row.at("platform") == "web_search" ? bass::Platform::web_search : bass::Platform::short_video;
        f.params = {detail::field_num(row, "p"), detail::field_num(row, "q")};
        f.residual_norm = detail::field_num(row, "residual_norm");
        f.rmse = detail::field_num(row, "rmse");
        f.converged = row.at("converged") == "true";
        f.n_points = static_cast<std::size_t>(detail::field_int(row, "n_points"));
        f.iterations = static_cast<std::size_t>(detail::field_int(row, "iterations"));
        (f.platform == bass::Platform::short_video ? e.short_video : e.web_search) = f;
    }
    return out;
}

/// (p, q) pairs per song for comparing the two platforms.
inline std::string format_bass_scatter(std::span<const bass::BatchEntry> entries) {
    std::string out = "song_id,p_short_video,q_short_video,p_web_search,q_web_search\n";
    for (const auto& e : entries) {
        if (!e.short_video || !e.web_search) continue;
        out += detail::join({e.song_id, detail::num(e.short_video->params.p), detail::num(e.short_video->params.q),
                             detail::num(e.web_search->params.p), detail::num(e.web_search->params.q)});
    }
    return out;
}

inline const std::string kOverlayHeader = "song_id,platform,date,t,observed,fitted\n";

/// Observed against fitted cumulative fractions for one fitted series.
inline std::string format_bass_overlay(const std::string& song_id, const TimeSeries& series,
                                       const bass::BassFit& fit) {
    const auto cum = cumulative_normalized(series);
    const auto times = bass::sample_times(series);
    std::string out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += detail::join({song_id, bass::to_string(fit.platform), format_iso_date(series.dates()[i]),
                             detail::num(times[i]), detail::num(cum.values()[i]),
                             detail::num(bass::cumulative(fit.params, times[i]))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Curation

inline std::string format_curation(const curation::Report& report, Format format) {
    std::string out;
    if (format == Format::csv) out += "song_id,stage,kept,reason\n";
    for (const auto& d : report.decisions) {
        if (format == Format::jsonl) {
            ordered_json j;
            j["song_id"] = d.song_id;
            j["stage"] = curation::to_string(d.stage);
            j["kept"] = d.kept;
            j["reason"] = d.reason;
            out += j.dump() + "\n";
        } else {
            out += detail::join({d.song_id, curation::to_string(d.stage), detail::boolean(d.kept), d.reason});
        }
    }
    return out;
}

inline curation::Stage parse_stage(std::string_view text) {
    for (auto s : curation::kStages)
        if (text == curation::to_string(s)) return s;
    throw Error("unknown curation stage '" + std::string(text) + "'");
}

inline std::vector<curation::Decision> parse_curation(const std::string& text, Format format,
                                                      const std::string& path = "<report>") {
    std::vector<curation::Decision> out;
    if (format == Format::jsonl) {
        for (const auto& j : detail::read_jsonl(text))
            out.push_back({j.at("song_id").get<std::string>(), parse_stage(j.at("stage").get<std::string>()),
                           j.at("kept").get<bool>(), j.at("reason").get<std::string>()});
        return out;
    }
    for (const auto& row : detail::read_csv(text, path).rows)
        out.push_back({row.at("song_id"), parse_stage(row.at("stage")), row.at("kept") == "true", row.at("reason")});
    return out;
}

inline std::string format_funnel(const curation::Report& report, Format format) {
    std::string out;
    if (format == Format::csv) {
        out += "stage,survivors\n";
        out += detail::join({"input", std::to_string(report.input_count)});
    } else {
        out += ordered_json{{"stage", "input"}, {"survivors", report.input_count}}.dump() + "\n";
    }
    for (std::size_t i = 0; i < curation::kStages.size(); ++i) {
        const auto* name = curation::to_string(curation::kStages[i]);
        if (format == Format::csv)
            out += detail::join({name, std::to_string(report.survivors[i])});
        else
            out += ordered_json{{"stage", name}, {"survivors", report.survivors[i]}}.dump() + "\n";
    }
    return out;
}

}  // namespace revival::report
