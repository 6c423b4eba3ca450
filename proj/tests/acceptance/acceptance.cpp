// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Run from the repository root (ctest does this).

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "chipcarbon/analyses.hpp"
#include "chipcarbon/cli.hpp"
#include "chipcarbon/dataset.hpp"
#include "chipcarbon/errors.hpp"
#include "chipcarbon/parameter_pack.hpp"
#include "chipcarbon/report_io.hpp"
#include "support.hpp"

using namespace chipcarbon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

NodeParameterPack reference_pack() {
    return load_parameter_pack(read_text_file(test::data_path("reference_pack.json")));
}

std::vector<ProcessorRecord> reference_records() {
    auto parsed = parse_processors(read_text_file(test::data_path("processors.csv")));
    if (!parsed.diagnostics.empty()) throw InputError("reference dataset has invalid rows");
    return parsed.records;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Outcome yield_oracle() {
    using big = boost::multiprecision::cpp_bin_float_50;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> area(0.0, 40.0), d0(0.0, 3.0), log_alpha(std::log(0.05), std::log(1e4));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = area(rng), d = d0(rng), al = std::exp(log_alpha(rng));
        const big want = boost::multiprecision::pow(big(1) + big(a) * big(d) / big(al), -big(al));
        const double got = yield_rate(a, d, al);
        worst = std::max(worst, static_cast<double>(boost::multiprecision::abs((big(got) - want) / want)));
    }
    const double poisson_gap = std::abs(yield_rate(1.0, 0.1, 1e6) - std::exp(-0.1));
    return {worst < 1e-12 && poisson_gap < 1e-4,
            fmt("max rel err %.3g over 1000 points; alpha=1e6 gap %.3g", worst, poisson_gap)};
}

Outcome affine_propagation() {
    StochasticInputs in;
    in.defect_density_per_cm2 = Distribution::point(0.1);
    in.epa_kwh_per_cm2 = Distribution::point(2.0);
    in.fab_carbon_intensity_kg_per_kwh = Distribution::point(0.5);
    in.materials_kg_per_cm2 = 0.5;
    const double mu = 0.35, sigma = 0.05;
    in.gpa_kg_per_cm2 = Distribution::gaussian(mu, sigma, false);
    const PackageSpec pkg = split_package(800.0, 2, 7.0, OverheadCurve({{1, 1.0}, {2, 2.05}}), 0.25, 1.0);
    const DesignParams design{0.1, 0.5, 1000};
    const UsageProfile usage{3.0, 0.6, 0.45};

    // Closed form: total = c + slope * GPA, slope = sum over dies of A / Y.
    double slope = 0.0;
    for (const auto& d : pkg.dies) {
        const double a = mm2_to_cm2(d.area_mm2);
        slope += a / yield_rate(a, 0.1, 2.0);
    }
    NodeSample at_zero = in.means();
    at_zero.gpa_kg_per_cm2 = 0.0;
    const double analytic = total_cfp(pkg, at_zero, design, 300.0, usage).total_kg + slope * mu;
    const double tol = 4.0 * slope * sigma / std::sqrt(1e4);

    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1ULL, 42ULL, 31337ULL}) {
        const auto est = run_monte_carlo(pkg, in, design, 300.0, usage, {10000, seed, 4, false});
        const double gap = std::abs(est.mean_kg - analytic);
        ok = ok && gap <= tol;
        detail += fmt("seed %.0f gap %.3g; ", static_cast<double>(seed), gap);
    }
    return {ok, detail + fmt("bound %.3g", tol)};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = read_text_file(e.path().string());
    return files;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "chipcarbon_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands{
        {"estimate", "--processor", "A100-SXM", "--processor", "EPYC 7742", "--retain-samples"},
        {"sweep-chiplets"},
        {"amortize"},
        {"shipments", "--revenue", test::data_path("revenue.csv")},
        {"cost-corr"},
        {"trend"}};
    std::size_t compared = 0;
    std::string failures;
    for (const auto& cmd : commands) {
        for (const std::string format : {"json", "csv"}) {
            std::map<std::string, std::string> reference;
            int run_index = 0;
            for (const std::string threads : {"1", "4", "1"}) {
                const fs::path out = root / (cmd[0] + "_" + format + "_" + std::to_string(run_index++));
                std::vector<std::string> args{"--dataset", test::data_path("processors.csv"), "--pack",
                                              test::data_path("reference_pack.json"), "--format", format,
                                              "--threads", threads, "--out", out.string()};
                args.insert(args.end(), cmd.begin(), cmd.end());
                std::ostringstream sink, err;
                if (run_cli(args, sink, err) != 0) {
                    failures += cmd[0] + " failed: " + err.str();
                    continue;
                }
                auto files = read_dir(out);
                if (reference.empty()) {
                    reference = std::move(files);
                } else {
                    ++compared;
                    if (files != reference) failures += cmd[0] + "/" + format + " threads=" + threads + " differs; ";
                }
            }
        }
    }
    fs::remove_all(root);
    return {failures.empty() && compared == commands.size() * 4,
            failures.empty() ? fmt("%.0f repeated runs byte-identical (threads 1 vs 4, json and csv)",
                                   static_cast<double>(compared))
                             : failures};
}

Outcome chiplet_crossover() {
    const auto pack = reference_pack();
    std::vector<double> areas;
    for (int a = 50; a <= 850; a += 50) areas.push_back(a);
    const std::vector<int> counts{1, 2, 4, 8};
    const auto report = chiplet_sweep(areas, counts, pack.nodes.at(7.0), pack);
    const auto opt = report.optimal_counts();
    bool monotone = opt.size() == areas.size();
    int at100 = 0, at850 = 0, crossover = 0;
    for (std::size_t i = 0; i < opt.size(); ++i) {
        if (i > 0 && opt[i].second < opt[i - 1].second) monotone = false;
        if (opt[i].first == 100.0) at100 = opt[i].second;
        if (opt[i].first == 850.0) at850 = opt[i].second;
        if (!crossover && opt[i].second > 1) crossover = static_cast<int>(opt[i].first);
    }
    return {at100 == 1 && at850 > 1 && monotone,
            fmt("optimal n=%.0f at 100 mm2, n=%.0f at 850 mm2, first n>1 at %.0f mm2", at100, at850, crossover) +
                (monotone ? ", nondecreasing" : ", NOT nondecreasing")};
}

Outcome amortization() {
    const auto pack = reference_pack();
    const auto records = reference_records();
    const auto& a100 = find_processor(records, "A100-SXM");
    const double embodied = point_estimate(a100, pack, pack.global.usage).embodied_kg;
    std::vector<double> lifetimes, idles;
    for (int i = 1; i <= 10; ++i) lifetimes.push_back(0.5 * i);
    for (int i = 0; i <= 9; ++i) idles.push_back(i / 10.0);
    const auto g = amortization_grid(a100.name, embodied, a100.tdp_w, lifetimes, idles,
                                     pack.global.usage.use_carbon_intensity_kg_per_kwh);
    double worst = 0.0;
    for (const auto& row : g.ratio) {
        const double k = *row[0] * lifetimes[0];
        for (std::size_t l = 0; l < row.size(); ++l) worst = std::max(worst, std::abs(*row[l] * lifetimes[l] - k) / k);
    }
    const auto& be = g.break_even[7];
    const double life = be.lifetime_years.value_or(NAN);
    return {be.idle_fraction == 0.7 && life > 1.5 && life <= 2.5 && worst <= 1e-9,
            fmt("idle 0.7 break-even %.4f y (ECFP %.1f kg); max rel deviation of ratio*lifetime %.3g", life, embodied,
                worst)};
}

Outcome shipments() {
    const auto pack = reference_pack();
    const auto records = reference_records();
    const auto revenue = parse_revenue(read_text_file(test::data_path("revenue.csv"))).records;
    MonteCarloConfig cfg;
    cfg.workers = 4;
    const auto r = aggregate_shipments(revenue, records, pack, cfg);
    const auto& last = r.rows.back();
    return {last.normalized_total_cfp > 50.0 && last.normalized_tflops_per_cfp > 100.0,
            fmt("%.0f: normalized total CFP %.2f, normalized TFLOPS/CFP %.2f", last.year, last.normalized_total_cfp,
                last.normalized_tflops_per_cfp)};
}

Outcome kde_validity() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> size(2, 60);
    std::uniform_real_distribution<double> loc(-5.0, 5.0), scale(0.01, 4.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::normal_distribution<double> obs(loc(rng), scale(rng));
        std::vector<double> v(size(rng));
        for (auto& x : v) x = obs(rng);
        const auto fitted = fit_kde(v);
        const auto& k = std::get<Kde>(fitted.law);
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double lo = *lo_it - 6 * k.bandwidth, hi = *hi_it + 6 * k.bandwidth;
        const int steps = 50000;
        const double h = (hi - lo) / steps;
        double mass = 0.5 * (kde_pdf(k, lo) + kde_pdf(k, hi));
        for (int i = 1; i < steps; ++i) mass += kde_pdf(k, lo + i * h);
        worst = std::max(worst, std::abs(mass * h - 1.0));
    }
    return {worst <= 1e-3, fmt("max |integral - 1| = %.3g over 20 sets", worst)};
}

Outcome overlap_oracle() {
    const auto a_law = Distribution::gaussian(0.0, 1.0, false);
    const auto b_law = Distribution::gaussian(3.0, 1.0, false);
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        RandomStream sa(2024, 0, i), sb(2024, 1, i);
        a.push_back(sample(a_law, sa));
        b.push_back(sample(b_law, sb));
    }
    const double got = overlap(a, b);
    const double want = 2.0 * normal_cdf(-1.5);
    return {std::abs(got - want) <= 0.02, fmt("overlap %.4f vs analytic %.4f", got, want)};
}

Outcome additivity_and_schema() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t exact = 0;
    for (int i = 0; i < 1000; ++i) {
        NodeSample s;
        s.defect_density_per_cm2 = 0.5 * u(rng);
        s.epa_kwh_per_cm2 = 3.0 * u(rng);
        s.gpa_kg_per_cm2 = u(rng);
        s.materials_kg_per_cm2 = u(rng);
        s.fab_carbon_intensity_kg_per_kwh = u(rng);
        s.clustering_alpha = 0.5 + 5 * u(rng);
        const int n = 1 + static_cast<int>(8 * u(rng));
        const auto pkg = split_package(10.0 + 1500.0 * u(rng), n, 7.0, OverheadCurve({{1, 1.0}, {2, 2.1}}),
                                       u(rng), 0.5 + 0.5 * u(rng));
        const auto b = total_cfp(pkg, s, {10 * u(rng), u(rng), 1 + static_cast<long long>(1e5 * u(rng))},
                                 1.0 + 800 * u(rng), {5 * u(rng), u(rng), u(rng)});
        exact += b.embodied_kg == b.design_kg + b.manufacturing_kg + b.packaging_kg &&
                 b.total_kg == b.embodied_kg + b.operational_kg;
    }

    const auto records = reference_records();
    const std::string rec_text = write_processors(records);
    const bool records_fix = parse_processors(rec_text).records == records &&
                             write_processors(parse_processors(rec_text).records) == rec_text;
    const auto revenue = parse_revenue(read_text_file(test::data_path("revenue.csv"))).records;
    const bool revenue_fix = parse_revenue(write_revenue(revenue)).records == revenue;
    const std::string pack_text = save_parameter_pack(reference_pack());
    const bool pack_fix = save_parameter_pack(load_parameter_pack(pack_text)) == pack_text;

    // Header rows of every CSV report the CLI writes, against the golden files.
    const fs::path out = fs::temp_directory_path() / "chipcarbon_acceptance_golden";
    fs::remove_all(out);
    std::size_t headers = 0, header_ok = 0;
    for (const auto& cmd : std::vector<std::vector<std::string>>{
             {"estimate", "--processor", "A100-SXM", "--processor", "H100", "--retain-samples"},
             {"sweep-chiplets"},
             {"amortize"},
             {"shipments", "--revenue", test::data_path("revenue.csv")},
             {"cost-corr"},
             {"trend"}}) {
        std::vector<std::string> args{"--dataset", test::data_path("processors.csv"), "--pack",
                                      test::data_path("reference_pack.json"), "--samples", "200", "--format", "csv",
                                      "--out", out.string()};
        args.insert(args.end(), cmd.begin(), cmd.end());
        std::ostringstream sink, err;
        if (run_cli(args, sink, err) != 0) continue;
    }
    for (const auto& [name, content] : read_dir(out)) {
        if (name == "manifest.json") continue;
        ++headers;
        const std::string golden_file = test::golden_path(name + ".header");
        if (!fs::exists(golden_file)) continue;
        header_ok += content.substr(0, content.find('\n') + 1) == read_text_file(golden_file);
    }
    fs::remove_all(out);

    const bool ok = exact == 1000 && records_fix && revenue_fix && pack_fix && headers == 15 && header_ok == headers;
    return {ok, fmt("additivity exact %.0f/1000; ", static_cast<double>(exact)) +
                    "round-trips processors=" + (records_fix ? "ok" : "FAIL") +
                    " revenue=" + (revenue_fix ? "ok" : "FAIL") + " pack=" + (pack_fix ? "ok" : "FAIL") +
                    fmt("; golden headers %.0f/%.0f", static_cast<double>(header_ok), static_cast<double>(headers))};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double time_limit_s;  // 0 = none
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "yield oracle", 1.0, yield_oracle},
        {2, "affine propagation", 5.0, affine_propagation},
        {3, "CLI determinism", 0.0, determinism},
        {4, "chiplet crossover", 1.0, chiplet_crossover},
        {5, "amortization break-even", 0.0, amortization},
        {6, "shipment aggregation", 0.0, shipments},
        {7, "KDE validity", 0.0, kde_validity},
        {8, "overlap oracle", 0.0, overlap_oracle},
        {9, "additivity and schema", 0.0, additivity_and_schema},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += fmt("; runtime %.3f s exceeds %.0f s", secs, c.time_limit_s);
        }
        std::printf("[%s] %d %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
