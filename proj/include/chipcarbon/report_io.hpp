#pragma once

// CSV and JSON renderings of every report. Column and key order is fixed
// and covered by golden tests; numbers are written in shortest round-trip
// form so both formats carry bit-identical values.

#include <string>
#include <string_view>
#include <vector>

#include "chipcarbon/analyses.hpp"
#include "chipcarbon/monte_carlo.hpp"

namespace chipcarbon {

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(std::string_view text);

struct ReportFile {
    std::string name;
    std::string content;
};

struct NamedEstimate {
    std::string name;
    double node_nm = 0.0;
    bool extrapolated = false;
    CarbonEstimate estimate;
};

struct OverlapEntry {
    std::string a;
    std::string b;
    double overlap = 0.0;
};

struct EstimateReport {
    std::vector<NamedEstimate> processors;
    std::vector<OverlapEntry> overlaps;
};

std::vector<ReportFile> render(const EstimateReport& report, ReportFormat format);
std::vector<ReportFile> render(const ChipletSweepReport& report, ReportFormat format);
std::vector<ReportFile> render(const AmortizationGrid& grid, ReportFormat format);
std::vector<ReportFile> render(const ShipmentReport& report, ReportFormat format);
std::vector<ReportFile> render(const CostCarbonReport& report, ReportFormat format);
std::vector<ReportFile> render(const TrendReport& report, ReportFormat format);

namespace columns {
inline constexpr std::string_view estimate[] = {
    "name", "node_nm", "extrapolated", "sample_count", "mean_kg", "stddev_kg", "p05_kg", "p25_kg", "p50_kg",
    "p75_kg", "p95_kg", "design_kg", "manufacturing_kg", "packaging_kg", "embodied_kg", "operational_kg",
    "total_kg", "rejected_draws", "rejection_warning"};
inline constexpr std::string_view estimate_overlap[] = {"a", "b", "overlap"};
inline constexpr std::string_view estimate_samples[] = {"name", "index", "total_kg"};
inline constexpr std::string_view chiplet_sweep[] = {
    "node_nm", "extrapolated", "total_area_mm2", "chiplet_count", "manufacturing_kg", "packaging_kg",
    "manufacturing_plus_packaging_kg", "is_optimal"};
inline constexpr std::string_view amortization[] = {
    "name", "extrapolated", "idle_fraction", "lifetime_years", "embodied_kg", "operational_kg", "ratio"};
inline constexpr std::string_view amortization_break_even[] = {
    "idle_fraction", "break_even_lifetime_years", "grid_break_even_lifetime_years"};
inline constexpr std::string_view shipments[] = {
    "year", "flagship", "units", "per_chip_cfp_kg", "total_cfp_kg", "peak_tflops", "tflops_per_cfp",
    "normalized_units", "normalized_per_chip_cfp", "normalized_total_cfp", "normalized_tflops_per_cfp",
    "extrapolated"};
inline constexpr std::string_view cost_corr[] = {
    "name", "node_nm", "die_area_mm2", "manufacturing_cost_usd", "embodied_cfp_kg", "price_usd", "extrapolated"};
inline constexpr std::string_view cost_corr_nodes[] = {
    "node_nm", "record_count", "mean_manufacturing_cost_usd", "mean_embodied_cfp_kg", "normalized_cost",
    "normalized_embodied", "divergence", "extrapolated"};
inline constexpr std::string_view trend[] = {
    "vendor", "segment", "kind", "year", "name", "node_nm", "die_area_mm2", "tdp_w", "benchmark",
    "performance", "total_cfp_kg", "embodied_cfp_kg", "operational_cfp_kg", "perf_per_cfp",
    "ecfpa_kg_per_cm2", "perf_per_ecfpa", "extrapolated"};
inline constexpr std::string_view key_value[] = {"key", "value"};
inline constexpr std::string_view skipped[] = {"message"};
}  // namespace columns

}  // namespace chipcarbon
