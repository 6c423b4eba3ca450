#pragma once

// Deterministic lifecycle carbon math for a single concrete parameter draw.
//
// Unit conventions: die areas are stored in mm^2; every per-area coefficient
// (EPA, GPA, materials, packaging carbon) is per cm^2. Conversion happens
// inside the functions below, never in stored data.

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace chipcarbon {

inline constexpr double kMm2PerCm2 = 100.0;
inline constexpr double kHoursPerYear = 8760.0;
inline constexpr double kDefaultClusteringAlpha = 2.0;

constexpr double mm2_to_cm2(double area_mm2) { return area_mm2 / kMm2PerCm2; }

struct DieSpec {
    double area_mm2 = 0.0;
    double node_nm = 0.0;
    std::optional<double> transistor_count_millions;
};

/// One joint draw of the fab-side parameters.
struct NodeSample {
    double defect_density_per_cm2 = 0.0;
    double epa_kwh_per_cm2 = 0.0;
    double gpa_kg_per_cm2 = 0.0;
    double materials_kg_per_cm2 = 0.0;
    double fab_carbon_intensity_kg_per_kwh = 0.0;
    double clustering_alpha = kDefaultClusteringAlpha;
};

/// Packaging area multiplier as a function of die count. Listed counts are
/// exact; counts between two listed ones interpolate linearly and counts
/// past the largest listed one extrapolate along the last segment.
class OverheadCurve {
public:
    OverheadCurve() : points_{{1, 1.0}} {}
    explicit OverheadCurve(std::map<int, double> points);

    double factor(int die_count) const;
    const std::map<int, double>& points() const { return points_; }

    friend bool operator==(const OverheadCurve&, const OverheadCurve&) = default;

private:
    std::map<int, double> points_;
};

struct PackageSpec {
    std::vector<DieSpec> dies;
    double packaging_overhead_factor = 1.0;
    double packaging_carbon_kg_per_cm2 = 0.0;
    double packaging_yield = 1.0;

    double total_area_mm2() const;
};

/// `count` equal dies sharing `total_area_mm2`, packaged with the overhead
/// the curve assigns to that count.
PackageSpec split_package(double total_area_mm2, int count, double node_nm,
                          const OverheadCurve& overhead,
                          double packaging_carbon_kg_per_cm2,
                          double packaging_yield);

struct DesignParams {
    double design_energy_kwh_per_mm2 = 0.0;
    double design_carbon_intensity_kg_per_kwh = 0.0;
    long long amortization_volume_units = 1;
};

struct UsageProfile {
    double lifetime_years = 0.0;
    double idle_fraction = 0.0;
    double use_carbon_intensity_kg_per_kwh = 0.0;
};

/// kg CO2eq per lifecycle stage. Build through make_breakdown so the
/// embodied and total fields are exact sums of their parts.
struct CarbonBreakdown {
    double design_kg = 0.0;
    double manufacturing_kg = 0.0;
    double packaging_kg = 0.0;
    double embodied_kg = 0.0;
    double operational_kg = 0.0;
    double total_kg = 0.0;

    friend bool operator==(const CarbonBreakdown&, const CarbonBreakdown&) = default;
};

CarbonBreakdown make_breakdown(double design_kg, double manufacturing_kg,
                               double packaging_kg, double operational_kg);

/// Negative-binomial die yield (1 + A*D0/alpha)^-alpha, A in cm^2.
double yield_rate(double area_cm2, double defect_density_per_cm2,
                  double clustering_alpha);

/// Carbon per good cm^2: (C_src*EPA + GPA + materials) / yield.
double carbon_per_area(const NodeSample& sample, double yield);

double manufacturing_cfp(const DieSpec& die, const NodeSample& sample);

double design_cfp(std::span<const DieSpec> dies, const DesignParams& params);

double packaging_cfp(const PackageSpec& pkg);

/// Design + per-die manufacturing + packaging. Each die's yield is taken
/// on its own area. operational_kg is zero.
CarbonBreakdown embodied_cfp(const PackageSpec& pkg, const NodeSample& sample,
                             const DesignParams& design);

/// Active hours burn TDP; idle hours draw nothing.
double operational_cfp(double tdp_w, const UsageProfile& usage);

CarbonBreakdown total_cfp(const PackageSpec& pkg, const NodeSample& sample,
                          const DesignParams& design, double tdp_w,
                          const UsageProfile& usage);

void validate(const DieSpec& die);
void validate(const NodeSample& sample);
void validate(const PackageSpec& pkg);
void validate(const DesignParams& params);
void validate(const UsageProfile& usage);

}  // namespace chipcarbon
