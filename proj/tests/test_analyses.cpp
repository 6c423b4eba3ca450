#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chipcarbon/analyses.hpp"
#include "chipcarbon/errors.hpp"
#include "support.hpp"

using namespace chipcarbon;

namespace {

std::vector<double> brute_ranks(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] < x[i]) ++less;
            else if (x[j] == x[i] && j != i) ++equal;
        }
        r[i] = 1.0 + less + 0.5 * equal;
    }
    return r;
}

double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            sxy += (x[i] - x[j]) * (y[i] - y[j]);
            sxx += (x[i] - x[j]) * (x[i] - x[j]);
            syy += (y[i] - y[j]) * (y[i] - y[j]);
        }
    return sxy / std::sqrt(sxx * syy);
}

const MonteCarloConfig kFast{400, 42, 2, false};

}  // namespace

TEST(Correlation, PerfectAndReversed) {
    const std::vector<double> x{1, 2, 3, 4}, y{10, 20, 35, 90}, z{9, 5, 2, 1};
    EXPECT_NEAR(*spearman(x, y), 1.0, 1e-15);
    EXPECT_NEAR(*spearman(x, z), -1.0, 1e-15);
    EXPECT_NEAR(*pearson(x, std::vector<double>{2, 4, 6, 8}), 1.0, 1e-15);
}

TEST(Correlation, UndefinedCases) {
    const std::vector<double> one{1.0}, flat{2, 2, 2}, x{1, 2, 3};
    EXPECT_FALSE(spearman(one, one).has_value());
    EXPECT_FALSE(pearson(flat, x).has_value());
    EXPECT_THROW(pearson(x, one), DomainError);
}

TEST(Correlation, MatchesBruteForceRankOracle) {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> n(2, 10), v(0, 6);
    for (int t = 0; t < 200; ++t) {
        const int size = n(rng);
        std::vector<double> x(size), y(size);
        for (int i = 0; i < size; ++i) {
            x[i] = v(rng);
            y[i] = v(rng) * 0.5;
        }
        EXPECT_EQ(average_ranks(x), brute_ranks(x));
        const auto rs = spearman(x, y);
        const auto rx = brute_ranks(x), ry = brute_ranks(y);
        const double want = brute_pearson(rx, ry);
        if (std::isnan(want)) {
            EXPECT_FALSE(rs.has_value());
        } else {
            ASSERT_TRUE(rs.has_value());
            EXPECT_NEAR(*rs, want, 1e-12);
            EXPECT_LE(std::abs(*rs), 1.0);
        }
    }
}

TEST(Sweep, NoDefectsNoPackagingAllTieToMonolithic) {
    auto p = test::point_pack();
    auto& n = p.nodes[7.0];
    n.defect_density_per_cm2 = Distribution::point(0.0);
    n.packaging_carbon_kg_per_cm2 = 0.0;
    const std::vector<double> areas{100, 400, 800};
    const std::vector<int> counts{1, 2, 4};
    const auto r = chiplet_sweep(areas, counts, n, p);
    ASSERT_EQ(r.rows.size(), 9u);
    for (const auto& [area, count] : r.optimal_counts()) EXPECT_EQ(count, 1) << area;
}

TEST(Sweep, ExactlyOneOptimalPerAreaAndMatchesMinimum) {
    const auto p = test::point_pack();
    const std::vector<double> areas{50, 200, 600, 1200};
    const std::vector<int> counts{4, 1, 2};
    const auto r = chiplet_sweep(areas, counts, p.nodes.at(7.0), p);
    ASSERT_EQ(r.rows.size(), 12u);
    for (std::size_t a = 0; a < areas.size(); ++a) {
        int optimal = 0;
        double best = INFINITY;
        for (std::size_t c = 0; c < 3; ++c) best = std::min(best, r.rows[a * 3 + c].manufacturing_plus_packaging_kg);
        for (std::size_t c = 0; c < 3; ++c) {
            const auto& row = r.rows[a * 3 + c];
            EXPECT_EQ(row.chiplet_count, std::vector<int>({1, 2, 4})[c]);
            EXPECT_EQ(row.manufacturing_plus_packaging_kg, row.manufacturing_kg + row.packaging_kg);
            if (row.is_optimal) {
                ++optimal;
                EXPECT_EQ(row.manufacturing_plus_packaging_kg, best);
            }
        }
        EXPECT_EQ(optimal, 1);
    }
}

TEST(Sweep, FlagsExtrapolatedNode) {
    const auto p = test::point_pack();
    const std::vector<double> areas{100};
    const std::vector<int> counts{1, 2};
    const auto r = chiplet_sweep(areas, counts, resolve_node(p, 5.0), p);
    EXPECT_TRUE(r.extrapolated);
    EXPECT_EQ(r.node_nm, 5.0);
}

TEST(Sweep, Errors) {
    const auto p = test::point_pack();
    const std::vector<double> areas{100}, bad{-1};
    const std::vector<int> no_mono{2, 4}, counts{1};
    EXPECT_THROW(chiplet_sweep(areas, no_mono, p.nodes.at(7.0), p), InputError);
    EXPECT_THROW(chiplet_sweep(bad, counts, p.nodes.at(7.0), p), InputError);
}

TEST(Amortization, HyperbolicRowsAndUnboundedCells) {
    const std::vector<double> lifetimes{0.5, 1.0, 2.0, 4.0};
    const std::vector<double> idles{0.0, 0.5, 1.0};
    const auto g = amortization_grid("x", 900.0, 400.0, lifetimes, idles, 0.45);
    ASSERT_EQ(g.ratio.size(), 3u);
    for (std::size_t i = 0; i < 2; ++i) {
        const double k = *g.ratio[i][0] * lifetimes[0];
        for (std::size_t l = 0; l < lifetimes.size(); ++l) {
            EXPECT_NEAR(*g.ratio[i][l] * lifetimes[l], k, 1e-9 * k);
            if (l > 0) EXPECT_LT(*g.ratio[i][l], *g.ratio[i][l - 1]);
        }
        EXPECT_EQ(*g.ratio[i][2], *g.ratio[i][1] / 2.0);
    }
    for (const auto& cell : g.ratio[2]) EXPECT_FALSE(cell.has_value());
    EXPECT_FALSE(g.break_even[2].lifetime_years.has_value());
    EXPECT_FALSE(g.break_even[2].grid_lifetime_years.has_value());
}

TEST(Amortization, BreakEven) {
    const std::vector<double> lifetimes{0.5, 1.0, 1.5, 2.0, 2.5};
    const std::vector<double> idles{0.7};
    const double per_year = operational_cfp(400.0, {1.0, 0.7, 0.45});
    const auto g = amortization_grid("x", 1.8 * per_year, 400.0, lifetimes, idles, 0.45);
    EXPECT_NEAR(*g.break_even[0].lifetime_years, 1.8, 1e-12);
    EXPECT_EQ(*g.break_even[0].grid_lifetime_years, 2.0);
}

TEST(Amortization, Errors) {
    const std::vector<double> empty, ok{1.0}, bad{1.0, 1.0}, idle{0.5};
    EXPECT_THROW(amortization_grid("x", 1.0, 100.0, empty, idle, 0.4), InputError);
    EXPECT_THROW(amortization_grid("x", 1.0, 100.0, ok, empty, 0.4), InputError);
    EXPECT_THROW(amortization_grid("x", 1.0, 100.0, bad, idle, 0.4), InputError);
}

TEST(Shipments, ArithmeticAndNormalization) {
    auto p = test::point_pack();
    auto a = test::record("A", 7, 500, 300);
    a.perf_peak_tflops = 100.0;
    auto b = test::record("B", 7, 800, 500);
    b.perf_peak_tflops = 400.0;
    const std::vector<RevenueRecord> rev{{2021, 5e6, "B", 2e4}, {2020, 1e6, "A", 1e4}};
    const auto r = aggregate_shipments(rev, {a, b}, p, kFast);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.profit_margin, 0.75);
    EXPECT_EQ(r.rows[0].year, 2020);
    EXPECT_EQ(r.rows[0].units, 100u);
    EXPECT_EQ(r.rows[1].units, 250u);
    EXPECT_EQ(r.rows[0].normalized_total_cfp, 1.0);
    EXPECT_EQ(r.rows[0].normalized_tflops_per_cfp, 1.0);
    EXPECT_EQ(r.rows[0].total_cfp_kg, 100.0 * r.rows[0].per_chip_cfp_kg);
    EXPECT_NEAR(r.rows[1].normalized_units, 2.5, 1e-15);
    EXPECT_EQ(r.rows[0].per_chip_cfp_kg, estimate_processor(a, p, kFast).estimate.mean_kg);
}

TEST(Shipments, SingleYearAllOnes) {
    auto a = test::record("A", 7, 500, 300);
    a.perf_peak_tflops = 100.0;
    const auto r = aggregate_shipments({{2020, 1e6, "A", 1e4}}, {a}, test::point_pack(), kFast);
    const auto& row = r.rows[0];
    EXPECT_EQ(row.normalized_units, 1.0);
    EXPECT_EQ(row.normalized_per_chip_cfp, 1.0);
    EXPECT_EQ(row.normalized_total_cfp, 1.0);
    EXPECT_EQ(row.normalized_tflops_per_cfp, 1.0);
}

TEST(Shipments, UnknownFlagshipIsNamed) {
    auto a = test::record("A100", 7, 500, 300);
    try {
        aggregate_shipments({{2020, 1e6, "A10", 1e4}}, {a}, test::point_pack(), kFast);
        FAIL();
    } catch (const NotFoundError& e) {
        EXPECT_NE(std::string(e.what()).find("A10"), std::string::npos);
        EXPECT_EQ(e.suggestion(), "A100");
    }
}

TEST(Shipments, MissingTflopsIsSkipped) {
    auto a = test::record("A", 7, 500, 300);
    a.perf_peak_tflops = 10.0;
    auto b = test::record("B", 7, 500, 300);
    const auto r = aggregate_shipments({{2020, 1e6, "A", 1e4}, {2021, 1e6, "B", 1e4}}, {a, b},
                                       test::point_pack(), kFast);
    EXPECT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.skipped.size(), 1u);
}

TEST(Cost, ProportionalAndReversedSeries) {
    CostCarbonRow a{"a", 7, 100, 10.0, 100.0, 5.0, false};
    CostCarbonRow b{"b", 7, 200, 20.0, 200.0, 1.0, false};
    const auto r = summarize_cost_rows({a, b});
    EXPECT_NEAR(*r.spearman_cost, 1.0, 1e-15);
    EXPECT_NEAR(*r.spearman_price, -1.0, 1e-15);
    ASSERT_EQ(r.nodes.size(), 1u);
    EXPECT_EQ(r.nodes[0].record_count, 2u);
}

TEST(Cost, NodeSeriesDescendingAndNormalized) {
    std::vector<CostCarbonRow> rows{{"a", 7, 100, 40.0, 300.0, {}, false},
                                    {"b", 28, 100, 10.0, 100.0, {}, false},
                                    {"c", 14, 100, 20.0, 150.0, {}, true}};
    const auto r = summarize_cost_rows(rows);
    ASSERT_EQ(r.nodes.size(), 3u);
    EXPECT_EQ(r.nodes[0].node_nm, 28.0);
    EXPECT_EQ(r.nodes[2].node_nm, 7.0);
    EXPECT_EQ(r.nodes[0].divergence, 1.0);
    EXPECT_NEAR(r.nodes[2].divergence, 3.0 / 4.0, 1e-15);
    EXPECT_TRUE(r.nodes[1].extrapolated);
    EXPECT_FALSE(r.spearman_price.has_value());
}

TEST(Cost, ManufacturingCostFormula) {
    const auto p = test::point_pack();
    auto rec = test::record("x", 7, 200, 100);
    rec.chiplet_count = 2;
    const double want = 2.0 * 1.0 * 10.0 / yield_rate(1.0, 0.1, 2.0);
    EXPECT_NEAR(manufacturing_cost_usd(rec, p.nodes.at(7.0)), want, 1e-12);
}

TEST(Cost, SeriesOverRecords) {
    const auto p = test::point_pack();
    const std::vector<ProcessorRecord> recs{test::record("a", 7, 100, 100), test::record("b", 10, 300, 100),
                                            test::record("c", 5, 200, 100)};
    const auto r = cost_ecfp_series(recs, p, kFast);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_TRUE(r.rows[2].extrapolated);
    EXPECT_FALSE(r.rows[0].extrapolated);
    EXPECT_THROW(cost_ecfp_series({}, p, kFast), InputError);
}

TEST(Trend, FlagshipRule) {
    std::vector<ProcessorRecord> recs{test::record("small", 7, 500, 400, 2020),
                                      test::record("big", 7, 600, 300, 2020),
                                      test::record("hot", 7, 700, 300, 2021),
                                      test::record("hotter", 7, 700, 350, 2021),
                                      test::record("b-name", 7, 800, 300, 2022),
                                      test::record("a-name", 7, 800, 300, 2022),
                                      test::record("solo", 7, 100, 50, 2023)};
    const auto f = select_flagships(recs);
    std::vector<std::string> names;
    for (const auto* r : f) names.push_back(r->name);
    EXPECT_EQ(names, (std::vector<std::string>{"big", "hotter", "a-name", "solo"}));
}

TEST(Trend, GroupsAndSkips) {
    const auto p = test::point_pack();
    auto gpu = test::record("g", 7, 500, 300, 2020);
    gpu.perf_opencl = 1000.0;
    auto cpu = test::record("c", 10, 200, 100, 2020);
    cpu.kind = ProcessorKind::cpu;
    cpu.perf_opencl = 50.0;  // datacenter CPUs are scored by Passmark
    const auto r = flagship_trend({gpu, cpu}, p, kFast);
    ASSERT_EQ(r.series.size(), 1u);
    EXPECT_EQ(r.series[0].kind, ProcessorKind::gpu);
    ASSERT_EQ(r.series[0].points.size(), 1u);
    EXPECT_EQ(r.series[0].points[0].metrics.benchmark, Benchmark::opencl);
    EXPECT_EQ(r.skipped.size(), 1u);
}
