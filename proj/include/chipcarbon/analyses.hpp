#pragma once

// Report-producing case studies over a processor dataset and a parameter
// pack. Every report carries an `extrapolated` flag wherever a node was not
// listed in the pack.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chipcarbon/dataset.hpp"
#include "chipcarbon/metrics.hpp"
#include "chipcarbon/monte_carlo.hpp"
#include "chipcarbon/parameter_pack.hpp"

namespace chipcarbon {

// ---- shared helpers --------------------------------------------------------

/// The record's silicon split evenly over its chiplets, packaged per `node`.
PackageSpec processor_package(const ProcessorRecord& record, const NodeEntry& node);

struct ProcessorEstimate {
    CarbonEstimate estimate;
    NodeEntry node;
};

/// Seeded Monte Carlo for one record under the pack's usage profile.
ProcessorEstimate estimate_processor(const ProcessorRecord& record, const NodeParameterPack& pack,
                                     const MonteCarloConfig& config);

/// total_cfp with every distribution at its mean.
CarbonBreakdown point_estimate(const ProcessorRecord& record, const NodeParameterPack& pack,
                               const UsageProfile& usage);

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks (ties share the mean rank).
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
std::vector<double> average_ranks(std::span<const double> values);

// ---- chiplet sweep ---------------------------------------------------------

struct ChipletSweepRow {
    double total_area_mm2 = 0.0;
    int chiplet_count = 1;
    double manufacturing_kg = 0.0;
    double packaging_kg = 0.0;
    double manufacturing_plus_packaging_kg = 0.0;
    bool is_optimal = false;
};

struct ChipletSweepReport {
    double node_nm = 0.0;
    bool extrapolated = false;
    std::vector<ChipletSweepRow> rows;  // area-major, counts ascending

    /// Chiplet count flagged optimal for each area, in sweep order.
    std::vector<std::pair<double, int>> optimal_counts() const;
};

/// Relative gap under which two configurations count as tied; ties go to
/// the smaller chiplet count.
inline constexpr double kSweepTieTolerance = 1e-12;

ChipletSweepReport chiplet_sweep(std::span<const double> areas_mm2, std::span<const int> counts,
                                 const NodeEntry& node, const NodeParameterPack& pack);

// ---- amortization grid -----------------------------------------------------

struct BreakEven {
    double idle_fraction = 0.0;
    /// Lifetime at which ECFP equals OCFP; nullopt if OCFP is zero.
    std::optional<double> lifetime_years;
    /// Smallest grid lifetime with ratio <= 1, if any.
    std::optional<double> grid_lifetime_years;
};

struct AmortizationGrid {
    std::string name;
    double embodied_kg = 0.0;
    double tdp_w = 0.0;
    double use_carbon_intensity_kg_per_kwh = 0.0;
    bool extrapolated = false;
    std::vector<double> lifetimes_years;
    std::vector<double> idle_fractions;
    /// ratio[i][l] = ECFP / OCFP at idle i, lifetime l; nullopt where OCFP == 0.
    std::vector<std::vector<std::optional<double>>> ratio;
    std::vector<std::vector<double>> operational_kg;
    std::vector<BreakEven> break_even;
};

/// Lifetimes must be positive and strictly increasing; idles in [0, 1].
AmortizationGrid amortization_grid(std::string name, double embodied_kg, double tdp_w,
                                   std::span<const double> lifetimes_years,
                                   std::span<const double> idle_fractions,
                                   double use_carbon_intensity_kg_per_kwh, bool extrapolated = false);

// ---- shipments -------------------------------------------------------------

inline constexpr double kAssumedProfitMargin = 0.75;

struct ShipmentRow {
    int year = 0;
    std::string flagship;
    std::uint64_t units = 0;
    double per_chip_cfp_kg = 0.0;
    double total_cfp_kg = 0.0;
    double peak_tflops = 0.0;
    double tflops_per_cfp = 0.0;
    double normalized_units = 1.0;
    double normalized_per_chip_cfp = 1.0;
    double normalized_total_cfp = 1.0;
    double normalized_tflops_per_cfp = 1.0;
    bool extrapolated = false;
};

struct ShipmentReport {
    /// Recorded for reference only; units are revenue / unit price.
    double profit_margin = kAssumedProfitMargin;
    std::vector<ShipmentRow> rows;  // ascending year; normalized to the first
    std::vector<std::string> skipped;
};

ShipmentReport aggregate_shipments(const std::vector<RevenueRecord>& revenue,
                                   const std::vector<ProcessorRecord>& records,
                                   const NodeParameterPack& pack, const MonteCarloConfig& config);

// ---- cost vs embodied carbon -----------------------------------------------

struct CostCarbonRow {
    std::string name;
    double node_nm = 0.0;
    double die_area_mm2 = 0.0;
    double manufacturing_cost_usd = 0.0;
    double embodied_cfp_kg = 0.0;
    std::optional<double> price_usd;
    bool extrapolated = false;
};

struct NodeDivergenceRow {
    double node_nm = 0.0;
    std::size_t record_count = 0;
    double mean_manufacturing_cost_usd = 0.0;
    double mean_embodied_cfp_kg = 0.0;
    double normalized_cost = 1.0;      // relative to the largest node
    double normalized_embodied = 1.0;  // relative to the largest node
    double divergence = 1.0;           // normalized_embodied / normalized_cost
    bool extrapolated = false;
};

struct CostCarbonReport {
    std::vector<CostCarbonRow> rows;
    std::optional<double> spearman_cost;
    std::optional<double> pearson_cost;
    std::optional<double> spearman_price;
    std::optional<double> pearson_price;
    std::vector<NodeDivergenceRow> nodes;  // descending node size
    std::vector<std::string> skipped;
};

/// Cost per die = area_cm2 * node cost per cm2 / yield at the mean defect
/// density, summed over dies.
double manufacturing_cost_usd(const ProcessorRecord& record, const NodeEntry& node);

CostCarbonReport cost_ecfp_series(const std::vector<ProcessorRecord>& records,
                                  const NodeParameterPack& pack, const MonteCarloConfig& config);

/// Correlations and per-node series from already-computed rows.
CostCarbonReport summarize_cost_rows(std::vector<CostCarbonRow> rows);

// ---- flagship trend --------------------------------------------------------

struct TrendPoint {
    int year = 0;
    double node_nm = 0.0;
    double die_area_mm2 = 0.0;
    double tdp_w = 0.0;
    MetricRow metrics;
};

struct TrendSeries {
    std::string vendor;
    MarketSegment segment = MarketSegment::desktop;
    ProcessorKind kind = ProcessorKind::cpu;
    std::vector<TrendPoint> points;  // ascending year
};

struct TrendReport {
    std::vector<TrendSeries> series;  // sorted by (vendor, segment, kind)
    std::vector<std::string> skipped;
};

/// Per (vendor, segment, kind) and release year: the record with the
/// largest die, then the higher TDP, then the lexicographically smaller name.
std::vector<const ProcessorRecord*> select_flagships(const std::vector<ProcessorRecord>& records);

TrendReport flagship_trend(const std::vector<ProcessorRecord>& records, const NodeParameterPack& pack,
                           const MonteCarloConfig& config);

}  // namespace chipcarbon
