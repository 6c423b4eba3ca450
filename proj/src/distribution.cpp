#include "chipcarbon/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chipcarbon/errors.hpp"

namespace chipcarbon {

double RandomStream::next_normal() {
    const double u1 = next_open_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Distribution Distribution::point(double value, bool truncate) {
    return {PointMass{value}, truncate};
}

Distribution Distribution::uniform(double lo, double hi, bool truncate) {
    return {Uniform{lo, hi}, truncate};
}

Distribution Distribution::gaussian(double mean, double stddev, bool truncate) {
    return {Gaussian{mean, stddev}, truncate};
}

Distribution Distribution::kde(std::vector<double> observations, double bandwidth, bool truncate) {
    return {Kde{std::move(observations), bandwidth}, truncate};
}

std::string_view Distribution::type_name() const {
    struct Visitor {
        std::string_view operator()(const PointMass&) const { return "point"; }
        std::string_view operator()(const Uniform&) const { return "uniform"; }
        std::string_view operator()(const Gaussian&) const { return "gaussian"; }
        std::string_view operator()(const Kde&) const { return "kde"; }
    };
    return std::visit(Visitor{}, law);
}

namespace {

double mean_of(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size());
}

double median_sorted(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

double Distribution::mean() const {
    struct Visitor {
        double operator()(const PointMass& d) const { return d.value; }
        double operator()(const Uniform& d) const { return 0.5 * (d.lo + d.hi); }
        double operator()(const Gaussian& d) const { return d.mean; }
        double operator()(const Kde& d) const { return mean_of(d.observations); }
    };
    return std::visit(Visitor{}, law);
}

double Distribution::stddev() const {
    struct Visitor {
        double operator()(const PointMass&) const { return 0.0; }
        double operator()(const Uniform& d) const { return (d.hi - d.lo) / std::sqrt(12.0); }
        double operator()(const Gaussian& d) const { return d.stddev; }
        double operator()(const Kde& d) const {
            return std::sqrt(population_variance(d.observations) + d.bandwidth * d.bandwidth);
        }
    };
    return std::visit(Visitor{}, law);
}

void validate(const Distribution& dist) {
    struct Visitor {
        void operator()(const PointMass& d) const {
            if (!std::isfinite(d.value)) throw DomainError("point mass value must be finite");
        }
        void operator()(const Uniform& d) const {
            if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.lo < d.hi))
                throw DomainError("uniform requires finite lo < hi");
        }
        void operator()(const Gaussian& d) const {
            if (!std::isfinite(d.mean) || !std::isfinite(d.stddev) || !(d.stddev > 0.0))
                throw DomainError("gaussian requires finite mean and stddev > 0");
        }
        void operator()(const Kde& d) const {
            if (d.observations.empty()) throw DomainError("kde requires at least one observation");
            for (double x : d.observations)
                if (!std::isfinite(x)) throw DomainError("kde observations must be finite");
            if (!std::isfinite(d.bandwidth) || !(d.bandwidth > 0.0))
                throw DomainError("kde bandwidth must be > 0");
        }
    };
    std::visit(Visitor{}, dist.law);
}

namespace {

double draw_once(const Distribution& dist, RandomStream& stream) {
    struct Visitor {
        RandomStream& rs;
        double operator()(const PointMass& d) const { return d.value; }
        double operator()(const Uniform& d) const { return d.lo + (d.hi - d.lo) * rs.next_uniform(); }
        double operator()(const Gaussian& d) const { return d.mean + d.stddev * rs.next_normal(); }
        double operator()(const Kde& d) const {
            const auto n = d.observations.size();
            auto pick = static_cast<std::size_t>(rs.next_uniform() * static_cast<double>(n));
            if (pick >= n) pick = n - 1;
            return d.observations[pick] + d.bandwidth * rs.next_normal();
        }
    };
    return std::visit(Visitor{stream}, dist.law);
}

}  // namespace

double sample(const Distribution& dist, RandomStream& stream) {
    if (!dist.truncate_at_zero) return draw_once(dist, stream);
    double x = 0.0;
    for (int attempt = 0; attempt < Distribution::kMaxTruncationAttempts; ++attempt) {
        x = draw_once(dist, stream);
        if (x >= 0.0) return x;
    }
    return 0.0;
}

double silverman_bandwidth(std::span<const double> observations) {
    const std::size_t n = observations.size();
    if (n == 0) throw DomainError("bandwidth needs at least one observation");

    std::vector<double> sorted(observations.begin(), observations.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        return std::max(std::abs(sorted.front()), 1.0) * 1e-6;

    const double sigma = std::sqrt(population_variance(sorted));
    // Tukey's hinges: for odd n both halves share the median.
    const std::size_t half = (n + 1) / 2;
    const std::span<const double> all(sorted);
    const double q1 = median_sorted(all.first(half));
    const double q3 = median_sorted(all.last(half));
    const double iqr = q3 - q1;

    // A zero IQR with nonzero spread (heavy ties) falls back to sigma.
    double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

Distribution fit_kde(std::vector<double> observations, bool truncate) {
    if (observations.size() < 2) throw DomainError("fit_kde needs at least two observations");
    for (double x : observations)
        if (!std::isfinite(x)) throw DomainError("kde observations must be finite");
    const double bw = silverman_bandwidth(observations);
    return Distribution::kde(std::move(observations), bw, truncate);
}

double kde_pdf(const Kde& kde, double x) {
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * kde.bandwidth *
                               static_cast<double>(kde.observations.size()));
    double sum = 0.0;
    for (double xi : kde.observations) {
        const double z = (x - xi) / kde.bandwidth;
        sum += std::exp(-0.5 * z * z);
    }
    return sum * norm;
}

}  // namespace chipcarbon
