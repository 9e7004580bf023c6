// Acceptance run: one PASS/FAIL line per criterion; non-zero exit on any failure.
//
// Usage: acceptance [--published-manifest M --catalog C [--allowlist A]]

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "planted.hpp"
#include "revival/revival.hpp"

using namespace revival;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0 for no limit
    std::function<Outcome()> run;
};

double rel_err(double got, double want) {
    if (got == want) return 0.0;
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// 1 ------------------------------------------------------------------------
Outcome granger_oracle() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> len(30, 200);
    double worst_f = 0.0, worst_p = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
        const std::size_t n = len(rng);
        auto x = oracle::noise(rng, n);
        auto y = oracle::noise(rng, n);
        // half the pairs carry a real dependence so the p-values span the range
        if (pair % 2)
            for (std::size_t t = 2; t < n; ++t) y[t] += 0.3 * x[t - 1] - 0.2 * x[t - 2] + 0.4 * y[t - 1];
        granger::Options o;
        o.lags = {1, 5};
        const auto r = granger::granger_test(x, y, o);
        for (const auto& l : r.per_lag) {
            const auto want = oracle::granger(x, y, l.lag);
            worst_f = std::max(worst_f, rel_err(l.f_stat, static_cast<double>(want.f)));
            if (want.p > 1e-250) worst_p = std::max(worst_p, rel_err(l.p_value, want.p));
        }
    }
    return {worst_f <= 1e-8 && worst_p <= 1e-8, fmt("max rel err F %.2e, p %.2e (tol 1e-8)", worst_f, worst_p)};
}

// 2 ------------------------------------------------------------------------
Outcome null_calibration() {
    // band: 0.2325 +/- 3 binomial sd at 200 trials, rate from 4000 reference trials
    constexpr double kLo = 0.14, kHi = 0.33;
    std::mt19937_64 rng(202);
    int hits = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = oracle::noise(rng, 100);
        const auto y = oracle::noise(rng, 100);
        hits += granger::granger_test(x, y, {}).best_p < 0.1;
    }
    const double rate = hits / 200.0;
    return {rate >= kLo && rate <= kHi, fmt("min-p < 0.1 rate %.3f, band [%.2f, %.2f]", rate, kLo, kHi)};
}

// 3 ------------------------------------------------------------------------
Outcome planted_causality() {
    int forward_ok = 0, reverse_ok = 0;
    double worst_forward = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(300 + seed);
        const auto source = oracle::noise(rng, 100, 1.0);
        const auto eps = oracle::noise(rng, 100, 0.1);
        std::vector<double> target(100);
        target[0] = eps[0];
        for (std::size_t t = 1; t < 100; ++t) target[t] = 0.9 * source[t - 1] + eps[t];
        const auto fwd = granger::granger_test(source, target, {});
        const auto rev = granger::granger_test(target, source, {});
        worst_forward = std::max(worst_forward, fwd.per_lag[0].p_value);
        forward_ok += fwd.per_lag[0].p_value < 0.01;
        reverse_ok += rev.per_lag[0].p_value > 0.1;
    }
    return {forward_ok == 20 && reverse_ok >= 16,
            fmt("forward lag-1 p < 0.01 in %.0f/20 (max %.1e); reverse p > 0.1 in %.0f/20", forward_ok, worst_forward,
                reverse_ok)};
}

// 4 ------------------------------------------------------------------------
Outcome bass_recovery() {
    std::vector<double> times(60);
    for (int i = 0; i < 60; ++i) times[i] = i + 1.0;
    double worst_clean = 0.0, worst_noisy = 0.0, worst_bias = 0.0;
    for (int ip = 0; ip < 5; ++ip) {
        for (int iq = 0; iq < 5; ++iq) {
            const bass::Params truth{0.005 + ip * (0.1 - 0.005) / 4, 0.05 + iq * (0.8 - 0.05) / 4};
            std::vector<double> clean(60);
            for (int i = 0; i < 60; ++i) clean[i] = bass::cumulative(truth, times[i]);
            const auto fit = bass::fit_cumulative(times, clean);
            worst_clean = std::max({worst_clean, std::abs(fit.params.p - truth.p), std::abs(fit.params.q - truth.q)});

            double err_p = 0.0, err_q = 0.0, mean_p = 0.0, mean_q = 0.0;
            for (int seed = 0; seed < 20; ++seed) {
                std::mt19937_64 rng(4000 + 100 * (5 * ip + iq) + seed);
                const auto e = oracle::noise(rng, 60, 0.01);
                std::vector<double> noisy(60);
                for (int i = 0; i < 60; ++i) noisy[i] = clean[i] + e[i];
                const auto f = bass::fit_cumulative(times, noisy);
                err_p += std::abs(f.params.p - truth.p) / 20;
                err_q += std::abs(f.params.q - truth.q) / 20;
                mean_p += f.params.p / 20;
                mean_q += f.params.q / 20;
            }
            worst_bias = std::max({worst_bias, std::abs(mean_p - truth.p), std::abs(mean_q - truth.q)});
            worst_noisy = std::max({worst_noisy, err_p, err_q});
        }
    }
    return {worst_clean <= 1e-4 && worst_noisy <= 0.02,
            fmt("noiseless max err %.2e (tol 1e-4); noisy mean abs err max %.4f (tol 0.02), bias of mean estimate max %.4f",
                worst_clean, worst_noisy, worst_bias)};
}

// 5 ------------------------------------------------------------------------
Outcome special_functions() {
    double worst_f22 = 0.0, worst_beta = 0.0;
    for (double f : {0.1, 1.0, 10.0}) worst_f22 = std::max(worst_f22, std::abs(numerics::f_survival(f, 2, 2) - 1.0 / (1.0 + f)));
    const std::pair<int, int> shapes[10] = {{1, 1}, {1, 4}, {2, 3}, {3, 2}, {5, 5}, {1, 9}, {7, 2}, {4, 11}, {12, 6}, {20, 20}};
    for (auto [a, b] : shapes)
        for (int i = 0; i < 10; ++i) {
            const double x = (i + 0.5) / 10.0;
            worst_beta = std::max(worst_beta, std::abs(numerics::regularized_incomplete_beta(x, a, b) - oracle::ibeta_integer(x, a, b)));
        }
    return {worst_f22 <= 1e-10 && worst_beta <= 1e-10,
            fmt("F(2,2) max err %.2e; 100-point integer grid max err %.2e (tol 1e-10)", worst_f22, worst_beta)};
}

// 6 ------------------------------------------------------------------------
Outcome hazard_identity() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> up(0.001, 0.5), uq(0.0, 3.0), ut(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const bass::Params prm{up(rng), uq(rng)};
        // keep 1 - F above e^-10 so the division itself is well conditioned
        const double t = ut(rng) * 10.0 / (prm.p + prm.q);
        const double F = bass::cumulative(prm, t);
        worst = std::max(worst, std::abs(bass::instantaneous(prm, t) / (1.0 - F) - (prm.p + prm.q * F)));
    }
    return {worst < 1e-10, fmt("max |f/(1-F) - (p + qF)| = %.2e over 1000 samples (tol 1e-10)", worst)};
}

// 7 ------------------------------------------------------------------------
Outcome curation_funnel() {
    const auto records = planted::planted_fixture();
    const std::vector<std::string> allow{"manual"};
    const auto r = curation::curate(records, planted::kCatalog, allow, planted::peak_basis());
    bool ok = r.report.input_count == 10 && r.report.survivors == planted::kExpectedSurvivors;

    std::string sweep;
    std::size_t prev = records.size();
    for (int threshold : {30, 50, 70}) {
        auto o = planted::peak_basis();
        o.match_threshold = threshold;
        const auto n = curation::curate(records, planted::kCatalog, allow, o).report.kept_count();
        ok = ok && n <= prev;
        prev = n;
        sweep += std::to_string(n) + " ";
    }
    sweep += "| ";
    prev = records.size();
    for (std::size_t mp : {5, 20, 50}) {
        auto o = planted::peak_basis();
        o.min_points = mp;
        const auto n = curation::curate(records, planted::kCatalog, allow, o).report.kept_count();
        ok = ok && n <= prev;
        prev = n;
        sweep += std::to_string(n) + " ";
    }
    std::string counts;
    for (auto c : r.report.survivors) counts += std::to_string(c) + " ";
    return {ok, "stage survivors " + counts + "(expected 9 8 7 5 5 4); kept by threshold / min_points " + sweep};
}

// 8 ------------------------------------------------------------------------
Outcome fuzzy_oracle() {
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<std::size_t> len(3, 40);
    const std::string alphabet = "abcdeABCDE &-'?";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    auto draw = [&](std::size_t n) {
        std::string s;
        while (s.size() < n) s.push_back(alphabet[pick(rng)]);
        return s;
    };
    int mismatches = 0, compared = 0;
    while (compared < 500) {
        const auto a = draw(len(rng));
        auto b = draw(len(rng));
        if (compared % 5 == 0 && b.size() > 3) b.insert(b.size() / 2, a.substr(0, a.size() / 2 + 1));
        if (fuzzy::normalize(a).empty() || fuzzy::normalize(b).empty()) continue;
        mismatches += fuzzy::partial_ratio(a, b) != oracle::partial_ratio(a, b);
        ++compared;
    }
    return {mismatches == 0, fmt("%.0f mismatches over %.0f pairs", mismatches, compared)};
}

// 9 ------------------------------------------------------------------------
struct PublishedInputs {
    std::optional<fs::path> manifest, catalog, allowlist;
};

Outcome published_numbers(const PublishedInputs& in, bool properties_passed) {
    if (!in.manifest)
        return {properties_passed, properties_passed
                                       ? "authors' dataset not supplied; satisfied by criteria 1-8"
                                       : "authors' dataset not supplied; judged by criteria 1-8, which did not all pass"};
    const auto out_dir = fs::temp_directory_path() / ("revival_published_" + std::to_string(::getpid()));
    pipeline::RunConfig c;
    c.manifest = in.manifest;
    c.catalog = in.catalog;
    c.allowlist = in.allowlist;
    c.out_dir = out_dir;
    std::ostringstream log;
    if (pipeline::run_pipeline(c, log, log) != 0) return {false, "pipeline failed: " + log.str()};
    const auto curated = ingest::parse_manifest(out_dir / pipeline::kCuratedManifest).songs.size();
    const auto g = report::parse_granger(ingest::read_text(out_dir / "granger_results.jsonl"), report::Format::jsonl);
    const auto fits = report::parse_bass(ingest::read_text(out_dir / "bass_fits.jsonl"), report::Format::jsonl);
    std::size_t n_fits = 0;
    for (const auto& f : fits) n_fits += f.short_video.has_value() + f.web_search.has_value();
    std::ostringstream ccdf_log;
    pipeline::run_ccdf(c, ccdf_log, ccdf_log);
    fs::remove_all(out_dir);
    const bool ok = curated == 30 && g.causal == 10 && n_fits == 20;
    return {ok, fmt("curated %.0f (30), causal %.0f (10), Bass fits %.0f (20); ", curated, g.causal, n_fits) +
                    ccdf_log.str().substr(0, ccdf_log.str().find('\n'))};
}

// 10 -----------------------------------------------------------------------
Outcome determinism() {
    const fs::path fixture = REVIVAL_FIXTURE_DIR;
    const auto base = fs::temp_directory_path() / ("revival_determinism_" + std::to_string(::getpid()));
    auto snapshot = [](const fs::path& root) {
        std::map<std::string, std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = ingest::read_text(e.path());
        return files;
    };
    bool ok = true;
    std::size_t files = 0;
    for (auto basis : {ThresholdBasis::peak, ThresholdBasis::total}) {
        std::map<std::string, std::string> runs[2];
        for (int i = 0; i < 2; ++i) {
            pipeline::RunConfig c;
            c.manifest = fixture / "manifest.json";
            c.catalog = fixture / "catalog.csv";
            c.allowlist = fixture / "allowlist.txt";
            c.peak_basis = basis;
            c.out_dir = base / std::to_string(i);
            std::ostringstream log;
            ok = ok && pipeline::run_pipeline(c, log, log) == 0;
            runs[i] = snapshot(c.out_dir);
            fs::remove_all(c.out_dir);
        }
        ok = ok && !runs[0].empty() && runs[0] == runs[1];
        files += runs[0].size();
    }
    fs::remove_all(base);
    return {ok, fmt("%.0f output files compared across two runs per peak basis", files)};
}

}  // namespace

int main(int argc, char** argv) {
    PublishedInputs published;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--published-manifest") published.manifest = argv[i + 1];
        else if (flag == "--catalog") published.catalog = argv[i + 1];
        else if (flag == "--allowlist") published.allowlist = argv[i + 1];
        else {
            std::fprintf(stderr, "unknown argument %s\n", argv[i]);
            return 2;
        }
    }

    bool properties_passed = true;
    const std::vector<Criterion> criteria{
        {1, "Granger oracle equivalence", 10.0, granger_oracle},
        {2, "Null calibration", 30.0, null_calibration},
        {3, "Planted causality", 0.0, planted_causality},
        {4, "Bass recovery", 20.0, bass_recovery},
        {5, "Special-function accuracy", 0.0, special_functions},
        {6, "Hazard identity", 0.0, hazard_identity},
        {7, "Curation funnel", 0.0, curation_funnel},
        {8, "Fuzzy-match oracle", 0.0, fuzzy_oracle},
        {9, "Published headline counts", 0.0, [&] { return published_numbers(published, properties_passed); }},
        {10, "Determinism", 0.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += fmt("; runtime %.2f s over the %.0f s limit", secs, c.time_limit_s);
        }
        if (c.id <= 8) properties_passed = properties_passed && o.pass;
        failures += !o.pass;
        std::printf("%s criterion %d: %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}
