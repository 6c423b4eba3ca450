#include "chipcarbon/report_io.hpp"

#include <json.hpp>

#include "chipcarbon/dataset.hpp"
#include "chipcarbon/errors.hpp"

namespace chipcarbon {

using ordered_json = nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json") return ReportFormat::json;
    if (text == "csv") return ReportFormat::csv;
    throw InputError("unknown format '" + std::string(text) + "' (expected json or csv)");
}

namespace {

class CsvTable {
public:
    template <std::size_t N>
    explicit CsvTable(const std::string_view (&cols)[N]) : width_(N) {
        for (std::size_t i = 0; i < N; ++i) text_ += (i ? "," : "") + std::string(cols[i]);
        text_ += '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw InvariantError("csv row width does not match its header");
        for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + csv_escape(cells[i]);
        text_ += '\n';
    }

    const std::string& text() const { return text_; }

private:
    std::size_t width_;
    std::string text_;
};

std::string num(double v) { return format_number(v); }
std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
std::string flag(bool b) { return b ? "true" : "false"; }
template <typename I>
std::string integer(I v) { return std::to_string(v); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ReportFile skipped_csv(const std::string& name, const std::vector<std::string>& messages) {
    CsvTable t(columns::skipped);
    for (const auto& m : messages) t.row({m});
    return {name, t.text()};
}

ordered_json breakdown_json(const CarbonBreakdown& b) {
    ordered_json j;
    j["design_kg"] = b.design_kg;
    j["manufacturing_kg"] = b.manufacturing_kg;
    j["packaging_kg"] = b.packaging_kg;
    j["embodied_kg"] = b.embodied_kg;
    j["operational_kg"] = b.operational_kg;
    j["total_kg"] = b.total_kg;
    return j;
}

const char* kQuantileKeys[] = {"p05_kg", "p25_kg", "p50_kg", "p75_kg", "p95_kg"};
static_assert(std::size(kQuantileKeys) == kReportedQuantiles.size());

}  // namespace

std::vector<ReportFile> render(const EstimateReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json root;
        root["processors"] = ordered_json::array();
        for (const auto& p : report.processors) {
            const CarbonEstimate& e = p.estimate;
            ordered_json j;
            j["name"] = p.name;
            j["node_nm"] = p.node_nm;
            j["extrapolated"] = p.extrapolated;
            j["sample_count"] = e.sample_count;
            j["mean_kg"] = e.mean_kg;
            j["stddev_kg"] = e.stddev_kg;
            ordered_json q;
            for (std::size_t i = 0; i < e.quantiles_kg.size(); ++i) q[kQuantileKeys[i]] = e.quantiles_kg[i];
            j["quantiles"] = q;
            j["breakdown"] = breakdown_json(e.mean_breakdown);
            j["rejected_draws"] = e.rejected_draws;
            j["rejection_warning"] = e.rejection_warning;
            if (e.samples) j["samples_kg"] = *e.samples;
            root["processors"].push_back(j);
        }
        root["overlaps"] = ordered_json::array();
        for (const auto& o : report.overlaps) root["overlaps"].push_back({{"a", o.a}, {"b", o.b}, {"overlap", o.overlap}});
        return {{"estimate.json", dump(root)}};
    }

    CsvTable main(columns::estimate);
    CsvTable overlaps(columns::estimate_overlap);
    CsvTable samples(columns::estimate_samples);
    bool any_samples = false;
    for (const auto& p : report.processors) {
        const CarbonEstimate& e = p.estimate;
        const CarbonBreakdown& b = e.mean_breakdown;
        main.row({p.name, num(p.node_nm), flag(p.extrapolated), integer(e.sample_count), num(e.mean_kg),
                  num(e.stddev_kg), num(e.quantiles_kg[0]), num(e.quantiles_kg[1]), num(e.quantiles_kg[2]),
                  num(e.quantiles_kg[3]), num(e.quantiles_kg[4]), num(b.design_kg), num(b.manufacturing_kg),
                  num(b.packaging_kg), num(b.embodied_kg), num(b.operational_kg), num(b.total_kg),
                  integer(e.rejected_draws), flag(e.rejection_warning)});
        if (e.samples) {
            any_samples = true;
            for (std::size_t i = 0; i < e.samples->size(); ++i)
                samples.row({p.name, integer(i), num((*e.samples)[i])});
        }
    }
    for (const auto& o : report.overlaps) overlaps.row({o.a, o.b, num(o.overlap)});
    std::vector<ReportFile> files{{"estimate.csv", main.text()}, {"estimate_overlap.csv", overlaps.text()}};
    if (any_samples) files.push_back({"estimate_samples.csv", samples.text()});
    return files;
}

std::vector<ReportFile> render(const ChipletSweepReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json root;
        root["node_nm"] = report.node_nm;
        root["extrapolated"] = report.extrapolated;
        root["rows"] = ordered_json::array();
        for (const auto& r : report.rows) {
            ordered_json j;
            j["total_area_mm2"] = r.total_area_mm2;
            j["chiplet_count"] = r.chiplet_count;
            j["manufacturing_kg"] = r.manufacturing_kg;
            j["packaging_kg"] = r.packaging_kg;
            j["manufacturing_plus_packaging_kg"] = r.manufacturing_plus_packaging_kg;
            j["is_optimal"] = r.is_optimal;
            root["rows"].push_back(j);
        }
        return {{"chiplet_sweep.json", dump(root)}};
    }
    CsvTable t(columns::chiplet_sweep);
    for (const auto& r : report.rows)
        t.row({num(report.node_nm), flag(report.extrapolated), num(r.total_area_mm2), integer(r.chiplet_count),
               num(r.manufacturing_kg), num(r.packaging_kg), num(r.manufacturing_plus_packaging_kg),
               flag(r.is_optimal)});
    return {{"chiplet_sweep.csv", t.text()}};
}

std::vector<ReportFile> render(const AmortizationGrid& g, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json root;
        root["name"] = g.name;
        root["embodied_kg"] = g.embodied_kg;
        root["tdp_w"] = g.tdp_w;
        root["use_carbon_intensity_kg_per_kwh"] = g.use_carbon_intensity_kg_per_kwh;
        root["extrapolated"] = g.extrapolated;
        root["lifetimes_years"] = g.lifetimes_years;
        root["idle_fractions"] = g.idle_fractions;
        root["ratio"] = ordered_json::array();
        for (const auto& row : g.ratio) {
            ordered_json r = ordered_json::array();
            for (const auto& v : row) r.push_back(opt_json(v));
            root["ratio"].push_back(r);
        }
        root["operational_kg"] = g.operational_kg;
        root["break_even"] = ordered_json::array();
        for (const auto& be : g.break_even) {
            ordered_json j;
            j["idle_fraction"] = be.idle_fraction;
            j["break_even_lifetime_years"] = opt_json(be.lifetime_years);
            j["grid_break_even_lifetime_years"] = opt_json(be.grid_lifetime_years);
            root["break_even"].push_back(j);
        }
        return {{"amortization.json", dump(root)}};
    }
    CsvTable t(columns::amortization);
    for (std::size_t i = 0; i < g.idle_fractions.size(); ++i)
        for (std::size_t l = 0; l < g.lifetimes_years.size(); ++l)
            t.row({g.name, flag(g.extrapolated), num(g.idle_fractions[i]), num(g.lifetimes_years[l]),
                   num(g.embodied_kg), num(g.operational_kg[i][l]), opt(g.ratio[i][l])});
    CsvTable be(columns::amortization_break_even);
    for (const auto& b : g.break_even)
        be.row({num(b.idle_fraction), opt(b.lifetime_years), opt(b.grid_lifetime_years)});
    return {{"amortization.csv", t.text()}, {"amortization_break_even.csv", be.text()}};
}

std::vector<ReportFile> render(const ShipmentReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json root;
        root["profit_margin"] = report.profit_margin;
        root["rows"] = ordered_json::array();
        for (const auto& r : report.rows) {
            ordered_json j;
            j["year"] = r.year;
            j["flagship"] = r.flagship;
            j["units"] = r.units;
            j["per_chip_cfp_kg"] = r.per_chip_cfp_kg;
            j["total_cfp_kg"] = r.total_cfp_kg;
            j["peak_tflops"] = r.peak_tflops;
            j["tflops_per_cfp"] = r.tflops_per_cfp;
            j["normalized_units"] = r.normalized_units;
            j["normalized_per_chip_cfp"] = r.normalized_per_chip_cfp;
            j["normalized_total_cfp"] = r.normalized_total_cfp;
            j["normalized_tflops_per_cfp"] = r.normalized_tflops_per_cfp;
            j["extrapolated"] = r.extrapolated;
            root["rows"].push_back(j);
        }
        root["skipped"] = report.skipped;
        return {{"shipments.json", dump(root)}};
    }
    CsvTable t(columns::shipments);
    for (const auto& r : report.rows)
        t.row({integer(r.year), r.flagship, integer(r.units), num(r.per_chip_cfp_kg), num(r.total_cfp_kg),
               num(r.peak_tflops), num(r.tflops_per_cfp), num(r.normalized_units), num(r.normalized_per_chip_cfp),
               num(r.normalized_total_cfp), num(r.normalized_tflops_per_cfp), flag(r.extrapolated)});
    CsvTable meta(columns::key_value);
    meta.row({"profit_margin", num(report.profit_margin)});
    return {{"shipments.csv", t.text()},
            {"shipments_meta.csv", meta.text()},
            skipped_csv("shipments_skipped.csv", report.skipped)};
}

std::vector<ReportFile> render(const CostCarbonReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json root;
        root["spearman_cost"] = opt_json(report.spearman_cost);
        root["pearson_cost"] = opt_json(report.pearson_cost);
        root["spearman_price"] = opt_json(report.spearman_price);
        root["pearson_price"] = opt_json(report.pearson_price);
        root["rows"] = ordered_json::array();
        for (const auto& r : report.rows) {
            ordered_json j;
            j["name"] = r.name;
            j["node_nm"] = r.node_nm;
            j["die_area_mm2"] = r.die_area_mm2;
            j["manufacturing_cost_usd"] = r.manufacturing_cost_usd;
            j["embodied_cfp_kg"] = r.embodied_cfp_kg;
            j["price_usd"] = opt_json(r.price_usd);
            j["extrapolated"] = r.extrapolated;
            root["rows"].push_back(j);
        }
        root["nodes"] = ordered_json::array();
        for (const auto& n : report.nodes) {
            ordered_json j;
            j["node_nm"] = n.node_nm;
            j["record_count"] = n.record_count;
            j["mean_manufacturing_cost_usd"] = n.mean_manufacturing_cost_usd;
            j["mean_embodied_cfp_kg"] = n.mean_embodied_cfp_kg;
            j["normalized_cost"] = n.normalized_cost;
            j["normalized_embodied"] = n.normalized_embodied;
            j["divergence"] = n.divergence;
            j["extrapolated"] = n.extrapolated;
            root["nodes"].push_back(j);
        }
        root["skipped"] = report.skipped;
        return {{"cost_corr.json", dump(root)}};
    }
    CsvTable rows(columns::cost_corr);
    for (const auto& r : report.rows)
        rows.row({r.name, num(r.node_nm), num(r.die_area_mm2), num(r.manufacturing_cost_usd), num(r.embodied_cfp_kg),
                  opt(r.price_usd), flag(r.extrapolated)});
    CsvTable nodes(columns::cost_corr_nodes);
    for (const auto& n : report.nodes)
        nodes.row({num(n.node_nm), integer(n.record_count), num(n.mean_manufacturing_cost_usd),
                   num(n.mean_embodied_cfp_kg), num(n.normalized_cost), num(n.normalized_embodied),
                   num(n.divergence), flag(n.extrapolated)});
    CsvTable summary(columns::key_value);
    summary.row({"spearman_cost", opt(report.spearman_cost)});
    summary.row({"pearson_cost", opt(report.pearson_cost)});
    summary.row({"spearman_price", opt(report.spearman_price)});
    summary.row({"pearson_price", opt(report.pearson_price)});
    return {{"cost_corr.csv", rows.text()},
            {"cost_corr_nodes.csv", nodes.text()},
            {"cost_corr_summary.csv", summary.text()},
            skipped_csv("cost_corr_skipped.csv", report.skipped)};
}

std::vector<ReportFile> render(const TrendReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json root;
        root["series"] = ordered_json::array();
        for (const auto& s : report.series) {
            ordered_json js;
            js["vendor"] = s.vendor;
            js["segment"] = std::string(to_string(s.segment));
            js["kind"] = std::string(to_string(s.kind));
            js["points"] = ordered_json::array();
            for (const auto& p : s.points) {
                const MetricRow& m = p.metrics;
                ordered_json j;
                j["year"] = p.year;
                j["name"] = m.name;
                j["node_nm"] = p.node_nm;
                j["die_area_mm2"] = p.die_area_mm2;
                j["tdp_w"] = p.tdp_w;
                j["benchmark"] = std::string(to_string(m.benchmark));
                j["performance"] = m.performance;
                j["total_cfp_kg"] = m.total_cfp_kg;
                j["embodied_cfp_kg"] = m.embodied_cfp_kg;
                j["operational_cfp_kg"] = m.operational_cfp_kg;
                j["perf_per_cfp"] = m.perf_per_cfp;
                j["ecfpa_kg_per_cm2"] = m.ecfpa_kg_per_cm2;
                j["perf_per_ecfpa"] = m.perf_per_ecfpa;
                j["extrapolated"] = m.extrapolated;
                js["points"].push_back(j);
            }
            root["series"].push_back(js);
        }
        root["skipped"] = report.skipped;
        return {{"trend.json", dump(root)}};
    }
    CsvTable t(columns::trend);
    for (const auto& s : report.series)
        for (const auto& p : s.points) {
            const MetricRow& m = p.metrics;
            t.row({s.vendor, std::string(to_string(s.segment)), std::string(to_string(s.kind)), integer(p.year),
                   m.name, num(p.node_nm), num(p.die_area_mm2), num(p.tdp_w), std::string(to_string(m.benchmark)),
                   num(m.performance), num(m.total_cfp_kg), num(m.embodied_cfp_kg), num(m.operational_cfp_kg),
                   num(m.perf_per_cfp), num(m.ecfpa_kg_per_cm2), num(m.perf_per_ecfpa), flag(m.extrapolated)});
        }
    return {{"trend.csv", t.text()}, skipped_csv("trend_skipped.csv", report.skipped)};
}

}  // namespace chipcarbon
