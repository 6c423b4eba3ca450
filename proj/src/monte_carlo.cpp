#include "chipcarbon/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "chipcarbon/errors.hpp"

namespace chipcarbon {

namespace {

constexpr std::uint64_t kMaxAttemptsPerSample = 1000;

struct SampleResult {
    CarbonBreakdown breakdown;
    std::uint64_t rejected = 0;
};

double draw(const Distribution& d, SampledParameter p, std::uint64_t seed,
            std::uint64_t index, std::uint64_t attempt) {
    RandomStream stream(seed, static_cast<std::uint64_t>(p), index, attempt);
    return sample(d, stream);
}

// x0 + sum(x_i - x0)/n: identical samples give back x0 exactly.
template <typename Get>
double shifted_mean(const std::vector<SampleResult>& rs, Get get) {
    const double x0 = get(rs.front());
    double acc = 0.0;
    for (const auto& r : rs) acc += get(r) - x0;
    return x0 + acc / static_cast<double>(rs.size());
}

}  // namespace

NodeSample StochasticInputs::means() const {
    NodeSample s;
    s.defect_density_per_cm2 = defect_density_per_cm2.mean();
    s.epa_kwh_per_cm2 = epa_kwh_per_cm2.mean();
    s.gpa_kg_per_cm2 = gpa_kg_per_cm2.mean();
    s.fab_carbon_intensity_kg_per_kwh = fab_carbon_intensity_kg_per_kwh.mean();
    s.materials_kg_per_cm2 = materials_kg_per_cm2;
    s.clustering_alpha = clustering_alpha;
    return s;
}

NodeSample draw_node_sample(const StochasticInputs& in, std::uint64_t seed,
                            std::uint64_t index, std::uint64_t attempt) {
    NodeSample s;
    s.defect_density_per_cm2 =
        draw(in.defect_density_per_cm2, SampledParameter::defect_density, seed, index, attempt);
    s.epa_kwh_per_cm2 = draw(in.epa_kwh_per_cm2, SampledParameter::epa, seed, index, attempt);
    s.gpa_kg_per_cm2 = draw(in.gpa_kg_per_cm2, SampledParameter::gpa, seed, index, attempt);
    s.fab_carbon_intensity_kg_per_kwh = draw(in.fab_carbon_intensity_kg_per_kwh,
                                             SampledParameter::fab_carbon_intensity, seed, index, attempt);
    s.materials_kg_per_cm2 = in.materials_kg_per_cm2;
    s.clustering_alpha = in.clustering_alpha;
    return s;
}

CarbonEstimate run_monte_carlo(const PackageSpec& pkg, const StochasticInputs& inputs,
                               const DesignParams& design, double tdp_w,
                               const UsageProfile& usage, const MonteCarloConfig& config) {
    if (config.samples < 1) throw DomainError("Monte Carlo needs at least one sample");
    validate(pkg);
    validate(design);
    validate(usage);
    for (const auto* d : {&inputs.defect_density_per_cm2, &inputs.epa_kwh_per_cm2,
                          &inputs.gpa_kg_per_cm2, &inputs.fab_carbon_intensity_kg_per_kwh})
        validate(*d);

    const std::size_t n = config.samples;
    std::vector<SampleResult> results(n);

    auto evaluate_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::uint64_t attempt = 0;
            for (;; ++attempt) {
                if (attempt == kMaxAttemptsPerSample)
                    throw DomainError("sample " + std::to_string(i) + " rejected " +
                                      std::to_string(kMaxAttemptsPerSample) + " times");
                try {
                    const NodeSample s = draw_node_sample(inputs, config.seed, i, attempt);
                    const CarbonBreakdown b = total_cfp(pkg, s, design, tdp_w, usage);
                    if (!std::isfinite(b.total_kg)) continue;
                    results[i] = {b, attempt};
                    break;
                } catch (const DomainError&) {
                }
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        evaluate_range(0, n);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (n + workers - 1) / workers;
            for (unsigned w = 0; w < workers; ++w) {
                const std::size_t begin = std::min(n, w * chunk);
                const std::size_t end = std::min(n, begin + chunk);
                pool.emplace_back([&, w, begin, end] {
                    try {
                        evaluate_range(begin, end);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    CarbonEstimate est;
    est.sample_count = n;
    for (const auto& r : results) est.rejected_draws += r.rejected;
    est.rejection_warning = est.rejected_draws * 100 > n;

    std::vector<double> totals(n);
    for (std::size_t i = 0; i < n; ++i) totals[i] = results[i].breakdown.total_kg;

    est.mean_kg = shifted_mean(results, [](const SampleResult& r) { return r.breakdown.total_kg; });
    if (n > 1) {
        double ss = 0.0;
        for (double t : totals) ss += (t - est.mean_kg) * (t - est.mean_kg);
        est.stddev_kg = std::sqrt(ss / static_cast<double>(n - 1));
    }

    std::vector<double> sorted = totals;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t q = 0; q < kReportedQuantiles.size(); ++q)
        est.quantiles_kg[q] = quantile_sorted(sorted, kReportedQuantiles[q]);

    est.mean_breakdown = make_breakdown(
        shifted_mean(results, [](const SampleResult& r) { return r.breakdown.design_kg; }),
        shifted_mean(results, [](const SampleResult& r) { return r.breakdown.manufacturing_kg; }),
        shifted_mean(results, [](const SampleResult& r) { return r.breakdown.packaging_kg; }),
        shifted_mean(results, [](const SampleResult& r) { return r.breakdown.operational_kg; }));

    if (config.retain_samples) est.samples = std::move(totals);
    return est;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    // Clamp so interpolation cannot step outside [sorted[lo], sorted[hi]].
    const double v = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    return std::clamp(v, sorted[lo], sorted[hi]);
}

double overlap(const CarbonEstimate& a, const CarbonEstimate& b) {
    if (!a.samples || !b.samples)
        throw InputError("overlap needs estimates that retain their samples");
    return overlap(*a.samples, *b.samples);
}

double overlap(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InputError("overlap needs nonempty sample sets");

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    const double lo = pooled.front();
    const double range = pooled.back() - lo;
    if (range == 0.0) return 1.0;

    const double iqr = quantile_sorted(pooled, 0.75) - quantile_sorted(pooled, 0.25);
    double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(pooled.size()));
    if (!(width > 0.0)) {
        // Sturges fallback when the pooled IQR collapses.
        width = range / std::ceil(std::log2(static_cast<double>(pooled.size())) + 1.0);
    }
    constexpr double kMaxBins = 1e6;
    const auto bins = static_cast<std::size_t>(std::clamp(std::ceil(range / width), 1.0, kMaxBins));
    width = range / static_cast<double>(bins);

    auto histogram = [&](std::span<const double> xs) {
        std::vector<std::uint64_t> h(bins, 0);
        for (double x : xs) {
            auto k = static_cast<std::size_t>((x - lo) / width);
            ++h[std::min(k, bins - 1)];
        }
        return h;
    };
    const auto ha = histogram(a);
    const auto hb = histogram(b);
    // Integer cross-multiplied counts keep identical inputs at exactly 1.
    const std::uint64_t na = a.size();
    const std::uint64_t nb = b.size();
    std::uint64_t shared = 0;
    for (std::size_t k = 0; k < bins; ++k) shared += std::min(ha[k] * nb, hb[k] * na);
    const double ov = static_cast<double>(shared) / (static_cast<double>(na) * static_cast<double>(nb));
    return std::clamp(ov, 0.0, 1.0);
}

}  // namespace chipcarbon
