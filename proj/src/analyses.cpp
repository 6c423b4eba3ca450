#include "chipcarbon/analyses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "chipcarbon/errors.hpp"

namespace chipcarbon {

PackageSpec processor_package(const ProcessorRecord& record, const NodeEntry& node) {
    return split_package(record.die_area_mm2, record.chiplet_count, record.node_nm, node.packaging_overhead,
                         node.packaging_carbon_kg_per_cm2, node.packaging_yield);
}

ProcessorEstimate estimate_processor(const ProcessorRecord& record, const NodeParameterPack& pack,
                                     const MonteCarloConfig& config) {
    NodeEntry node = resolve_node(pack, record.node_nm);
    CarbonEstimate est = run_monte_carlo(processor_package(record, node), stochastic_inputs(node, pack),
                                         pack.global.design, record.tdp_w, pack.global.usage, config);
    return {std::move(est), std::move(node)};
}

CarbonBreakdown point_estimate(const ProcessorRecord& record, const NodeParameterPack& pack,
                               const UsageProfile& usage) {
    const NodeEntry node = resolve_node(pack, record.node_nm);
    return total_cfp(processor_package(record, node), mean_sample(node, pack), pack.global.design,
                     record.tdp_w, usage);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("correlation inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("correlation inputs differ in length");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

// ---- chiplet sweep ---------------------------------------------------------

std::vector<std::pair<double, int>> ChipletSweepReport::optimal_counts() const {
    std::vector<std::pair<double, int>> out;
    for (const auto& r : rows)
        if (r.is_optimal) out.emplace_back(r.total_area_mm2, r.chiplet_count);
    return out;
}

ChipletSweepReport chiplet_sweep(std::span<const double> areas_mm2, std::span<const int> counts,
                                 const NodeEntry& node, const NodeParameterPack& pack) {
    if (areas_mm2.empty() || counts.empty()) throw InputError("chiplet sweep needs areas and counts");
    std::vector<int> sorted_counts(counts.begin(), counts.end());
    std::sort(sorted_counts.begin(), sorted_counts.end());
    sorted_counts.erase(std::unique(sorted_counts.begin(), sorted_counts.end()), sorted_counts.end());
    if (sorted_counts.front() != 1) throw InputError("chiplet counts must include 1 (monolithic)");
    for (double a : areas_mm2)
        if (!(a > 0.0) || !std::isfinite(a)) throw InputError("sweep areas must be positive");

    const NodeSample sample = mean_sample(node, pack);
    ChipletSweepReport report;
    report.node_nm = node.node_nm;
    report.extrapolated = node.extrapolated;

    for (double area : areas_mm2) {
        const std::size_t first = report.rows.size();
        std::size_t best = first;
        for (int n : sorted_counts) {
            const PackageSpec pkg = split_package(area, n, node.node_nm, node.packaging_overhead,
                                                  node.packaging_carbon_kg_per_cm2, node.packaging_yield);
            ChipletSweepRow row;
            row.total_area_mm2 = area;
            row.chiplet_count = n;
            for (const auto& die : pkg.dies) row.manufacturing_kg += manufacturing_cfp(die, sample);
            row.packaging_kg = packaging_cfp(pkg);
            row.manufacturing_plus_packaging_kg = row.manufacturing_kg + row.packaging_kg;
            report.rows.push_back(row);

            const double incumbent = report.rows[best].manufacturing_plus_packaging_kg;
            const double v = row.manufacturing_plus_packaging_kg;
            if (v < incumbent - kSweepTieTolerance * std::abs(incumbent)) best = report.rows.size() - 1;
        }
        report.rows[best].is_optimal = true;
    }
    return report;
}

// ---- amortization grid -----------------------------------------------------

AmortizationGrid amortization_grid(std::string name, double embodied_kg, double tdp_w,
                                   std::span<const double> lifetimes_years,
                                   std::span<const double> idle_fractions,
                                   double use_carbon_intensity_kg_per_kwh, bool extrapolated) {
    if (lifetimes_years.empty() || idle_fractions.empty())
        throw InputError("amortization grid needs nonempty lifetime and idle axes");
    for (std::size_t i = 0; i < lifetimes_years.size(); ++i) {
        if (!(lifetimes_years[i] > 0.0) || !std::isfinite(lifetimes_years[i]))
            throw InputError("lifetimes must be positive");
        if (i > 0 && !(lifetimes_years[i] > lifetimes_years[i - 1]))
            throw InputError("lifetimes must be strictly increasing");
    }
    for (double idle : idle_fractions)
        if (!(idle >= 0.0 && idle <= 1.0)) throw InputError("idle fractions must lie in [0, 1]");
    if (!(embodied_kg >= 0.0) || !std::isfinite(embodied_kg)) throw InputError("embodied carbon must be >= 0");

    AmortizationGrid g;
    g.name = std::move(name);
    g.embodied_kg = embodied_kg;
    g.tdp_w = tdp_w;
    g.use_carbon_intensity_kg_per_kwh = use_carbon_intensity_kg_per_kwh;
    g.extrapolated = extrapolated;
    g.lifetimes_years.assign(lifetimes_years.begin(), lifetimes_years.end());
    g.idle_fractions.assign(idle_fractions.begin(), idle_fractions.end());

    for (double idle : idle_fractions) {
        std::vector<std::optional<double>> ratios;
        std::vector<double> ocfps;
        BreakEven be;
        be.idle_fraction = idle;
        for (double life : lifetimes_years) {
            const double ocfp = operational_cfp(tdp_w, {life, idle, use_carbon_intensity_kg_per_kwh});
            ocfps.push_back(ocfp);
            if (ocfp > 0.0) {
                const double r = embodied_kg / ocfp;
                ratios.emplace_back(r);
                if (!be.grid_lifetime_years && r <= 1.0) be.grid_lifetime_years = life;
            } else {
                ratios.emplace_back(std::nullopt);
            }
        }
        const double ocfp_per_year = operational_cfp(tdp_w, {1.0, idle, use_carbon_intensity_kg_per_kwh});
        if (ocfp_per_year > 0.0) be.lifetime_years = embodied_kg / ocfp_per_year;
        g.ratio.push_back(std::move(ratios));
        g.operational_kg.push_back(std::move(ocfps));
        g.break_even.push_back(be);
    }
    return g;
}

// ---- shipments -------------------------------------------------------------

ShipmentReport aggregate_shipments(const std::vector<RevenueRecord>& revenue,
                                   const std::vector<ProcessorRecord>& records,
                                   const NodeParameterPack& pack, const MonteCarloConfig& config) {
    if (revenue.empty()) throw InputError("shipment aggregation needs at least one revenue row");
    std::vector<RevenueRecord> sorted = revenue;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.year < b.year; });

    // Resolve every flagship up front so an unknown name fails before any work.
    for (const auto& r : sorted) (void)find_processor(records, r.flagship_name);

    std::map<std::string, ProcessorEstimate> cache;
    ShipmentReport report;
    for (const auto& r : sorted) {
        const ProcessorRecord& rec = find_processor(records, r.flagship_name);
        const auto score = select_performance(rec, ScoreContext::shipments);
        if (!score) {
            report.skipped.push_back(std::to_string(r.year) + " " + rec.name + ": missing perf_peak_tflops");
            continue;
        }
        auto it = cache.find(rec.name);
        if (it == cache.end()) it = cache.emplace(rec.name, estimate_processor(rec, pack, config)).first;
        const ProcessorEstimate& pe = it->second;

        ShipmentRow row;
        row.year = r.year;
        row.flagship = rec.name;
        row.units = static_cast<std::uint64_t>(std::floor(r.revenue_usd / r.unit_price_usd));
        row.per_chip_cfp_kg = pe.estimate.mean_kg;
        row.total_cfp_kg = static_cast<double>(row.units) * row.per_chip_cfp_kg;
        row.peak_tflops = score->value;
        row.tflops_per_cfp = perf_per_cfp(score->value, row.per_chip_cfp_kg);
        row.extrapolated = pe.node.extrapolated;
        report.rows.push_back(std::move(row));
    }
    if (report.rows.empty()) throw InputError("no revenue row has a flagship with a peak TFLOPS figure");

    const ShipmentRow& base = report.rows.front();
    const double base_units = static_cast<double>(base.units);
    const double base_chip = base.per_chip_cfp_kg;
    const double base_total = base.total_cfp_kg;
    const double base_eff = base.tflops_per_cfp;
    for (auto& row : report.rows) {
        row.normalized_units = base_units > 0.0 ? static_cast<double>(row.units) / base_units : 0.0;
        row.normalized_per_chip_cfp = row.per_chip_cfp_kg / base_chip;
        row.normalized_total_cfp = base_total > 0.0 ? row.total_cfp_kg / base_total : 0.0;
        row.normalized_tflops_per_cfp = base_eff > 0.0 ? row.tflops_per_cfp / base_eff : 0.0;
    }
    if (base_units == 0.0 || base_eff == 0.0)
        report.skipped.push_back("baseline year has zero units or zero TFLOPS; affected normalized columns set to 0");
    return report;
}

// ---- cost vs embodied carbon -----------------------------------------------

double manufacturing_cost_usd(const ProcessorRecord& record, const NodeEntry& node) {
    const PackageSpec pkg = processor_package(record, node);
    const double d0 = node.defect_density_per_cm2.mean();
    double cost = 0.0;
    for (const auto& die : pkg.dies) {
        const double area_cm2 = mm2_to_cm2(die.area_mm2);
        cost += area_cm2 * node.manufacturing_cost_usd_per_cm2 / yield_rate(area_cm2, d0, node.clustering_alpha);
    }
    return cost;
}

CostCarbonReport summarize_cost_rows(std::vector<CostCarbonRow> rows) {
    CostCarbonReport report;
    std::vector<double> cost, carbon, price, price_carbon;
    for (const auto& r : rows) {
        cost.push_back(r.manufacturing_cost_usd);
        carbon.push_back(r.embodied_cfp_kg);
        if (r.price_usd) {
            price.push_back(*r.price_usd);
            price_carbon.push_back(r.embodied_cfp_kg);
        }
    }
    report.spearman_cost = spearman(cost, carbon);
    report.pearson_cost = pearson(cost, carbon);
    report.spearman_price = spearman(price, price_carbon);
    report.pearson_price = pearson(price, price_carbon);

    std::map<double, NodeDivergenceRow, std::greater<>> by_node;
    for (const auto& r : rows) {
        auto& n = by_node[r.node_nm];
        n.node_nm = r.node_nm;
        ++n.record_count;
        n.mean_manufacturing_cost_usd += r.manufacturing_cost_usd;
        n.mean_embodied_cfp_kg += r.embodied_cfp_kg;
        n.extrapolated = n.extrapolated || r.extrapolated;
    }
    for (auto& [nm, n] : by_node) {
        n.mean_manufacturing_cost_usd /= static_cast<double>(n.record_count);
        n.mean_embodied_cfp_kg /= static_cast<double>(n.record_count);
        report.nodes.push_back(n);
    }
    if (!report.nodes.empty()) {
        const double c0 = report.nodes.front().mean_manufacturing_cost_usd;
        const double e0 = report.nodes.front().mean_embodied_cfp_kg;
        for (auto& n : report.nodes) {
            n.normalized_cost = c0 > 0.0 ? n.mean_manufacturing_cost_usd / c0 : 0.0;
            n.normalized_embodied = e0 > 0.0 ? n.mean_embodied_cfp_kg / e0 : 0.0;
            n.divergence = n.normalized_cost > 0.0 ? n.normalized_embodied / n.normalized_cost : 0.0;
        }
    }
    report.rows = std::move(rows);
    return report;
}

CostCarbonReport cost_ecfp_series(const std::vector<ProcessorRecord>& records,
                                  const NodeParameterPack& pack, const MonteCarloConfig& config) {
    std::vector<CostCarbonRow> rows;
    std::vector<std::string> skipped;
    for (const auto& rec : records) {
        NodeEntry node;
        try {
            node = resolve_node(pack, rec.node_nm);
        } catch (const InputError& e) {
            skipped.push_back(rec.name + ": " + e.what());
            continue;
        }
        CostCarbonRow row;
        row.name = rec.name;
        row.node_nm = rec.node_nm;
        row.die_area_mm2 = rec.die_area_mm2;
        row.manufacturing_cost_usd = manufacturing_cost_usd(rec, node);
        row.embodied_cfp_kg = estimate_processor(rec, pack, config).estimate.mean_breakdown.embodied_kg;
        row.price_usd = rec.price_usd;
        row.extrapolated = node.extrapolated;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("no costable records");
    CostCarbonReport report = summarize_cost_rows(std::move(rows));
    report.skipped = std::move(skipped);
    return report;
}

// ---- flagship trend --------------------------------------------------------

std::vector<const ProcessorRecord*> select_flagships(const std::vector<ProcessorRecord>& records) {
    using Key = std::tuple<std::string, MarketSegment, ProcessorKind, int>;
    std::map<Key, const ProcessorRecord*> best;
    auto better = [](const ProcessorRecord& a, const ProcessorRecord& b) {
        if (a.die_area_mm2 != b.die_area_mm2) return a.die_area_mm2 > b.die_area_mm2;
        if (a.tdp_w != b.tdp_w) return a.tdp_w > b.tdp_w;
        return a.name < b.name;
    };
    for (const auto& r : records) {
        const Key k{r.vendor, r.segment, r.kind, r.release_year};
        auto [it, inserted] = best.emplace(k, &r);
        if (!inserted && better(r, *it->second)) it->second = &r;
    }
    std::vector<const ProcessorRecord*> out;
    out.reserve(best.size());
    for (const auto& [k, r] : best) out.push_back(r);
    return out;
}

TrendReport flagship_trend(const std::vector<ProcessorRecord>& records, const NodeParameterPack& pack,
                           const MonteCarloConfig& config) {
    TrendReport report;
    for (const ProcessorRecord* rec : select_flagships(records)) {
        const auto score = select_performance(*rec, ScoreContext::trend);
        if (!score) {
            report.skipped.push_back(rec->name + ": missing perf_" +
                                     std::string(to_string(designated_benchmark(*rec, ScoreContext::trend))));
            continue;
        }
        const ProcessorEstimate pe = estimate_processor(*rec, pack, config);

        if (report.series.empty() || report.series.back().vendor != rec->vendor ||
            report.series.back().segment != rec->segment || report.series.back().kind != rec->kind) {
            report.series.push_back({rec->vendor, rec->segment, rec->kind, {}});
        }
        TrendPoint p;
        p.year = rec->release_year;
        p.node_nm = rec->node_nm;
        p.die_area_mm2 = rec->die_area_mm2;
        p.tdp_w = rec->tdp_w;
        p.metrics = make_metric_row(*rec, *score, pe.estimate, pe.node.extrapolated);
        report.series.back().points.push_back(std::move(p));
    }
    return report;
}

}  // namespace chipcarbon
