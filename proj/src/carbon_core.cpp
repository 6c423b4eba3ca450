#include "chipcarbon/carbon_core.hpp"

#include <cmath>
#include <iterator>
#include <string>

#include "chipcarbon/errors.hpp"

namespace chipcarbon {

namespace {

void require_finite_nonneg(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0)
        throw DomainError(std::string(what) + " must be finite and >= 0, got " + std::to_string(v));
}

void require_finite_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0)
        throw DomainError(std::string(what) + " must be finite and > 0, got " + std::to_string(v));
}

}  // namespace

OverheadCurve::OverheadCurve(std::map<int, double> points) : points_(std::move(points)) {
    if (points_.empty() || points_.begin()->first != 1)
        throw DomainError("packaging overhead curve must list die count 1");
    for (const auto& [count, factor] : points_) {
        if (count < 1) throw DomainError("packaging overhead die counts must be >= 1");
        require_finite_nonneg(factor, "packaging overhead factor");
    }
}

double OverheadCurve::factor(int die_count) const {
    if (die_count < 1) throw DomainError("die count must be >= 1");
    auto hi = points_.lower_bound(die_count);
    if (hi != points_.end() && hi->first == die_count) return hi->second;
    if (points_.size() == 1) return points_.begin()->second;

    // Past the largest listed count, reuse the last segment.
    if (hi == points_.end()) hi = std::prev(points_.end());
    auto lo = std::prev(hi);
    const double t = static_cast<double>(die_count - lo->first) / (hi->first - lo->first);
    const double f = lo->second + t * (hi->second - lo->second);
    return f < 0.0 ? 0.0 : f;
}

double PackageSpec::total_area_mm2() const {
    double total = 0.0;
    for (const auto& d : dies) total += d.area_mm2;
    return total;
}

PackageSpec split_package(double total_area_mm2, int count, double node_nm,
                          const OverheadCurve& overhead,
                          double packaging_carbon_kg_per_cm2, double packaging_yield) {
    if (count < 1) throw DomainError("chiplet count must be >= 1");
    require_finite_positive(total_area_mm2, "total area");
    PackageSpec pkg;
    pkg.dies.assign(static_cast<std::size_t>(count),
                    DieSpec{total_area_mm2 / count, node_nm, std::nullopt});
    pkg.packaging_overhead_factor = overhead.factor(count);
    pkg.packaging_carbon_kg_per_cm2 = packaging_carbon_kg_per_cm2;
    pkg.packaging_yield = packaging_yield;
    return pkg;
}

CarbonBreakdown make_breakdown(double design_kg, double manufacturing_kg,
                               double packaging_kg, double operational_kg) {
    CarbonBreakdown b;
    b.design_kg = design_kg;
    b.manufacturing_kg = manufacturing_kg;
    b.packaging_kg = packaging_kg;
    b.embodied_kg = design_kg + manufacturing_kg + packaging_kg;
    b.operational_kg = operational_kg;
    b.total_kg = b.embodied_kg + operational_kg;
    return b;
}

void validate(const DieSpec& die) {
    require_finite_nonneg(die.area_mm2, "die area");
    require_finite_positive(die.node_nm, "die node");
    if (die.transistor_count_millions)
        require_finite_nonneg(*die.transistor_count_millions, "transistor count");
}

void validate(const NodeSample& s) {
    require_finite_nonneg(s.defect_density_per_cm2, "defect density");
    require_finite_nonneg(s.epa_kwh_per_cm2, "EPA");
    require_finite_nonneg(s.gpa_kg_per_cm2, "GPA");
    require_finite_nonneg(s.materials_kg_per_cm2, "materials carbon");
    require_finite_nonneg(s.fab_carbon_intensity_kg_per_kwh, "fab carbon intensity");
    require_finite_positive(s.clustering_alpha, "clustering alpha");
}

void validate(const PackageSpec& pkg) {
    if (pkg.dies.empty()) throw DomainError("package must contain at least one die");
    for (const auto& d : pkg.dies) validate(d);
    require_finite_nonneg(pkg.packaging_overhead_factor, "packaging overhead factor");
    require_finite_nonneg(pkg.packaging_carbon_kg_per_cm2, "packaging carbon");
    if (!(pkg.packaging_yield > 0.0 && pkg.packaging_yield <= 1.0))
        throw DomainError("packaging yield must lie in (0, 1], got " + std::to_string(pkg.packaging_yield));
}

void validate(const DesignParams& p) {
    require_finite_nonneg(p.design_energy_kwh_per_mm2, "design energy");
    require_finite_nonneg(p.design_carbon_intensity_kg_per_kwh, "design carbon intensity");
    if (p.amortization_volume_units < 1) throw DomainError("amortization volume must be >= 1");
}

void validate(const UsageProfile& u) {
    require_finite_nonneg(u.lifetime_years, "lifetime");
    require_finite_nonneg(u.use_carbon_intensity_kg_per_kwh, "use-phase carbon intensity");
    if (!(u.idle_fraction >= 0.0 && u.idle_fraction <= 1.0))
        throw DomainError("idle fraction must lie in [0, 1], got " + std::to_string(u.idle_fraction));
}

double yield_rate(double area_cm2, double defect_density_per_cm2, double clustering_alpha) {
    require_finite_nonneg(area_cm2, "area");
    require_finite_nonneg(defect_density_per_cm2, "defect density");
    require_finite_positive(clustering_alpha, "clustering alpha");
    // exp/log1p keeps full relative precision for large alpha, where the
    // base 1 + A*D0/alpha sits within a few ulps of 1.
    return std::exp(-clustering_alpha * std::log1p(area_cm2 * defect_density_per_cm2 / clustering_alpha));
}

double carbon_per_area(const NodeSample& sample, double yield) {
    if (!(yield > 0.0 && yield <= 1.0))
        throw DomainError("yield must lie in (0, 1], got " + std::to_string(yield));
    const double numerator = sample.fab_carbon_intensity_kg_per_kwh * sample.epa_kwh_per_cm2 +
                             sample.gpa_kg_per_cm2 + sample.materials_kg_per_cm2;
    return numerator / yield;
}

double manufacturing_cfp(const DieSpec& die, const NodeSample& sample) {
    validate(die);
    validate(sample);
    const double area_cm2 = mm2_to_cm2(die.area_mm2);
    const double y = yield_rate(area_cm2, sample.defect_density_per_cm2, sample.clustering_alpha);
    return area_cm2 * carbon_per_area(sample, y);
}

double design_cfp(std::span<const DieSpec> dies, const DesignParams& params) {
    validate(params);
    double area_mm2 = 0.0;
    for (const auto& d : dies) {
        validate(d);
        area_mm2 += d.area_mm2;
    }
    return area_mm2 * params.design_energy_kwh_per_mm2 * params.design_carbon_intensity_kg_per_kwh /
           static_cast<double>(params.amortization_volume_units);
}

double packaging_cfp(const PackageSpec& pkg) {
    validate(pkg);
    return mm2_to_cm2(pkg.total_area_mm2()) * pkg.packaging_overhead_factor *
           pkg.packaging_carbon_kg_per_cm2 / pkg.packaging_yield;
}

CarbonBreakdown embodied_cfp(const PackageSpec& pkg, const NodeSample& sample,
                             const DesignParams& design) {
    validate(pkg);
    double manufacturing = 0.0;
    for (const auto& die : pkg.dies) manufacturing += manufacturing_cfp(die, sample);
    return make_breakdown(design_cfp(pkg.dies, design), manufacturing, packaging_cfp(pkg), 0.0);
}

double operational_cfp(double tdp_w, const UsageProfile& usage) {
    require_finite_positive(tdp_w, "TDP");
    validate(usage);
    const double active_kwh =
        tdp_w * usage.lifetime_years * kHoursPerYear * (1.0 - usage.idle_fraction) / 1000.0;
    return active_kwh * usage.use_carbon_intensity_kg_per_kwh;
}

CarbonBreakdown total_cfp(const PackageSpec& pkg, const NodeSample& sample,
                          const DesignParams& design, double tdp_w, const UsageProfile& usage) {
    const CarbonBreakdown e = embodied_cfp(pkg, sample, design);
    return make_breakdown(e.design_kg, e.manufacturing_kg, e.packaging_kg,
                          operational_cfp(tdp_w, usage));
}

}  // namespace chipcarbon
