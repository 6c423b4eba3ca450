#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chipcarbon/dataset.hpp"
#include "chipcarbon/monte_carlo.hpp"

namespace chipcarbon {

enum class Benchmark { opencl, passmark, peak_tflops };

std::string_view to_string(Benchmark b);

/// Which analysis the score feeds. Shipment aggregation uses datasheet
/// peak throughput; everything else uses measured benchmark scores.
enum class ScoreContext { trend, shipments };

struct PerformanceScore {
    double value = 0.0;
    Benchmark benchmark = Benchmark::opencl;
};

/// Desktop CPUs and all GPUs use the OpenCL score, datacenter CPUs use
/// Passmark, shipments use peak TFLOPS. nullopt when the record lacks it.
Benchmark designated_benchmark(const ProcessorRecord& record, ScoreContext context);
std::optional<PerformanceScore> select_performance(const ProcessorRecord& record, ScoreContext context);

double perf_per_cfp(double performance, double total_cfp_kg);

/// Embodied carbon per cm^2 of silicon; area is the summed die area in mm^2.
double ecfpa(double embodied_kg, double area_mm2);

double perf_per_ecfpa(double performance, double ecfpa_kg_per_cm2);

/// Every value divided by values[baseline_index].
std::vector<double> normalize_series(std::span<const double> values, std::size_t baseline_index);

struct MetricRow {
    std::string name;
    double performance = 0.0;
    Benchmark benchmark = Benchmark::opencl;
    double total_cfp_kg = 0.0;
    double embodied_cfp_kg = 0.0;
    double operational_cfp_kg = 0.0;
    double perf_per_cfp = 0.0;
    double ecfpa_kg_per_cm2 = 0.0;
    double perf_per_ecfpa = 0.0;
    bool extrapolated = false;
};

/// Derived fields are computed from the score and the estimate's means.
MetricRow make_metric_row(const ProcessorRecord& record, const PerformanceScore& score,
                          const CarbonEstimate& estimate, bool extrapolated);

}  // namespace chipcarbon
