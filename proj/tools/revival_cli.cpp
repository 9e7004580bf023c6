#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "revival/revival.hpp"

namespace {

using revival::pipeline::RunConfig;

void add_common(CLI::App& cmd, RunConfig& cfg, std::string& cutoff, std::string& basis, std::string& format,
                std::string& manifest, std::string& catalog, std::string& allowlist, std::string& out_dir) {
    cmd.add_option("--manifest", manifest, "Dataset manifest (JSON)");
    cmd.add_option("--catalog", catalog, "Release catalog (CSV: title,artist,release_date,release_kind)");
    cmd.add_option("--allowlist", allowlist, "Manually curated song ids, one per line");
    cmd.add_option("--cutoff-date", cutoff, "Latest accepted release date (YYYY-MM-DD)")->capture_default_str();
    cmd.add_option("--min-points", cfg.min_points, "Minimum windowed series length")->capture_default_str();
    cmd.add_option("--peak-threshold", cfg.peak_threshold, "Peak window threshold fraction")->capture_default_str();
    cmd.add_option("--peak-basis", basis, "Threshold basis: total or peak")
        ->check(CLI::IsMember({"total", "peak"}))
        ->capture_default_str();
    cmd.add_option("--match-threshold", cfg.match_threshold, "Fuzzy match threshold (strictly above)")
        ->capture_default_str();
    cmd.add_option("--lag-min", cfg.lag_min, "Smallest Granger lag")->capture_default_str();
    cmd.add_option("--lag-max", cfg.lag_max, "Largest Granger lag")->capture_default_str();
    cmd.add_option("--alpha", cfg.alpha, "Significance level for the causal verdict")->capture_default_str();
    cmd.add_flag("--bonferroni", cfg.bonferroni, "Bonferroni-correct the minimum p-value across lags");
    cmd.add_option("--bass-rmse-max", cfg.bass_rmse_max, "RMSE threshold for acceptable Bass fits")
        ->capture_default_str();
    cmd.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    cmd.add_option("--format", format, "Report format")->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-platform song revival analysis: curation, Granger causality, Bass diffusion fits"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string cutoff = "2016-09-30", basis = "total", format = "jsonl";
    std::string manifest, catalog, allowlist, out_dir = ".";

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&, std::ostream&, std::ostream&);
    };
    const Command commands[] = {
        {"curate", "Filter the dataset and write the curated manifest", revival::pipeline::run_curate},
        {"granger", "Granger-test short-video against web-search popularity", revival::pipeline::run_granger},
        {"bass", "Fit Bass diffusion models for Granger-causal songs", revival::pipeline::run_bass},
        {"ccdf", "CCDF of per-song total short-video popularity", revival::pipeline::run_ccdf},
        {"pipeline", "curate, granger and bass in one run", revival::pipeline::run_pipeline},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(*sub, cfg, cutoff, basis, format, manifest, catalog, allowlist, out_dir);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.cutoff_date = revival::parse_iso_date(cutoff);
    } catch (const revival::Error& e) {
        std::cerr << "--cutoff-date: " << e.what() << "\n";
        return 1;
    }
    cfg.peak_basis = basis == "peak" ? revival::ThresholdBasis::peak : revival::ThresholdBasis::total;
    cfg.format = revival::report::parse_format(format);
    if (!manifest.empty()) cfg.manifest = manifest;
    if (!catalog.empty()) cfg.catalog = catalog;
    if (!allowlist.empty()) cfg.allowlist = allowlist;
    cfg.out_dir = out_dir;

    for (const auto& c : commands)
        if (app.got_subcommand(c.name)) return c.run(cfg, std::cout, std::cerr);
    return 1;
}
