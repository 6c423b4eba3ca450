#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "chipcarbon/carbon_core.hpp"
#include "chipcarbon/distribution.hpp"

namespace chipcarbon {

/// Uncertain fab parameters. The remaining NodeSample fields are fixed.
struct StochasticInputs {
    Distribution defect_density_per_cm2;
    Distribution epa_kwh_per_cm2;
    Distribution gpa_kg_per_cm2;
    Distribution fab_carbon_intensity_kg_per_kwh;
    double materials_kg_per_cm2 = 0.0;
    double clustering_alpha = kDefaultClusteringAlpha;

    /// Every distribution collapsed to its mean.
    NodeSample means() const;
};

/// Stream identifiers for the sampled parameters.
enum class SampledParameter : std::uint64_t {
    defect_density = 0,
    epa = 1,
    gpa = 2,
    fab_carbon_intensity = 3,
};

/// One joint draw for sample `index`. Pure in (seed, index, attempt).
NodeSample draw_node_sample(const StochasticInputs& inputs, std::uint64_t seed,
                            std::uint64_t index, std::uint64_t attempt);

struct MonteCarloConfig {
    std::size_t samples = 10000;
    std::uint64_t seed = 42;
    unsigned workers = 1;
    bool retain_samples = false;
};

inline constexpr std::array<double, 5> kReportedQuantiles = {0.05, 0.25, 0.50, 0.75, 0.95};

struct CarbonEstimate {
    std::size_t sample_count = 0;
    std::optional<std::vector<double>> samples;  // per-sample total_kg, index order
    double mean_kg = 0.0;
    double stddev_kg = 0.0;
    std::array<double, kReportedQuantiles.size()> quantiles_kg{};
    CarbonBreakdown mean_breakdown;
    std::size_t rejected_draws = 0;
    bool rejection_warning = false;  // more than 1% of draws rejected

    friend bool operator==(const CarbonEstimate&, const CarbonEstimate&) = default;
};

/// Draws `config.samples` joint samples through total_cfp and summarizes
/// them. A draw that raises a DomainError is rejected and redrawn with the
/// next attempt counter. Results are bit-identical for any worker count.
CarbonEstimate run_monte_carlo(const PackageSpec& pkg, const StochasticInputs& inputs,
                               const DesignParams& design, double tdp_w,
                               const UsageProfile& usage, const MonteCarloConfig& config);

/// Linear-interpolation quantile (type 7) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

/// Overlap coefficient sum_k min(p_a[k], p_b[k]) over shared histogram bins
/// with Freedman-Diaconis width on the pooled samples. Both estimates must
/// retain their samples.
double overlap(const CarbonEstimate& a, const CarbonEstimate& b);
double overlap(std::span<const double> a, std::span<const double> b);

}  // namespace chipcarbon
