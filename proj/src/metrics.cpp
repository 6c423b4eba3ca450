#include "chipcarbon/metrics.hpp"

#include <cmath>

#include "chipcarbon/carbon_core.hpp"
#include "chipcarbon/errors.hpp"

namespace chipcarbon {

std::string_view to_string(Benchmark b) {
    switch (b) {
        case Benchmark::opencl: return "opencl";
        case Benchmark::passmark: return "passmark";
        case Benchmark::peak_tflops: return "peak_tflops";
    }
    return "unknown";
}

Benchmark designated_benchmark(const ProcessorRecord& record, ScoreContext context) {
    if (context == ScoreContext::shipments) return Benchmark::peak_tflops;
    if (record.kind == ProcessorKind::cpu && record.segment == MarketSegment::datacenter)
        return Benchmark::passmark;
    return Benchmark::opencl;
}

std::optional<PerformanceScore> select_performance(const ProcessorRecord& record, ScoreContext context) {
    const Benchmark b = designated_benchmark(record, context);
    const std::optional<double>* field = nullptr;
    switch (b) {
        case Benchmark::opencl: field = &record.perf_opencl; break;
        case Benchmark::passmark: field = &record.perf_passmark; break;
        case Benchmark::peak_tflops: field = &record.perf_peak_tflops; break;
    }
    if (!field->has_value()) return std::nullopt;
    return PerformanceScore{**field, b};
}

double perf_per_cfp(double performance, double total_cfp_kg) {
    if (!(total_cfp_kg > 0.0)) throw DomainError("perf_per_cfp needs a positive carbon footprint");
    if (!(performance >= 0.0)) throw DomainError("performance must be >= 0");
    return performance / total_cfp_kg;
}

double ecfpa(double embodied_kg, double area_mm2) {
    if (!(area_mm2 > 0.0)) throw DomainError("ecfpa needs a positive area");
    if (!(embodied_kg >= 0.0)) throw DomainError("embodied carbon must be >= 0");
    return embodied_kg / mm2_to_cm2(area_mm2);
}

double perf_per_ecfpa(double performance, double ecfpa_kg_per_cm2) {
    if (!(ecfpa_kg_per_cm2 > 0.0)) throw DomainError("perf_per_ecfpa needs a positive ECFPA");
    if (!(performance >= 0.0)) throw DomainError("performance must be >= 0");
    return performance / ecfpa_kg_per_cm2;
}

std::vector<double> normalize_series(std::span<const double> values, std::size_t baseline_index) {
    if (baseline_index >= values.size()) throw DomainError("baseline index out of range");
    const double base = values[baseline_index];
    if (base == 0.0 || !std::isfinite(base)) throw DomainError("baseline value must be finite and nonzero");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v / base);
    return out;
}

MetricRow make_metric_row(const ProcessorRecord& record, const PerformanceScore& score,
                          const CarbonEstimate& estimate, bool extrapolated) {
    MetricRow row;
    row.name = record.name;
    row.performance = score.value;
    row.benchmark = score.benchmark;
    row.total_cfp_kg = estimate.mean_kg;
    row.embodied_cfp_kg = estimate.mean_breakdown.embodied_kg;
    row.operational_cfp_kg = estimate.mean_breakdown.operational_kg;
    row.perf_per_cfp = perf_per_cfp(score.value, row.total_cfp_kg);
    row.ecfpa_kg_per_cm2 = ecfpa(row.embodied_cfp_kg, record.die_area_mm2);
    row.perf_per_ecfpa = perf_per_ecfpa(score.value, row.ecfpa_kg_per_cm2);
    row.extrapolated = extrapolated;
    return row;
}

}  // namespace chipcarbon
