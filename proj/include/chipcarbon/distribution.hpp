#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "chipcarbon/random_stream.hpp"

namespace chipcarbon {

struct PointMass {
    double value = 0.0;
    friend bool operator==(const PointMass&, const PointMass&) = default;
};

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const Uniform&, const Uniform&) = default;
};

struct Gaussian {
    double mean = 0.0;
    double stddev = 1.0;
    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Gaussian-kernel density estimate over a fixed observation set.
struct Kde {
    std::vector<double> observations;
    double bandwidth = 1.0;
    friend bool operator==(const Kde&, const Kde&) = default;
};

/// A sampleable univariate law. When `truncate_at_zero` is set, negative
/// draws are redrawn up to kMaxTruncationAttempts times and then clamped to 0.
struct Distribution {
    std::variant<PointMass, Uniform, Gaussian, Kde> law;
    bool truncate_at_zero = true;

    static constexpr int kMaxTruncationAttempts = 100;

    static Distribution point(double value, bool truncate = true);
    static Distribution uniform(double lo, double hi, bool truncate = true);
    static Distribution gaussian(double mean, double stddev, bool truncate = true);
    static Distribution kde(std::vector<double> observations, double bandwidth, bool truncate = true);

    std::string_view type_name() const;

    /// Mean of the untruncated law.
    double mean() const;
    /// Standard deviation of the untruncated law (mixture stddev for a KDE).
    double stddev() const;

    friend bool operator==(const Distribution&, const Distribution&) = default;
};

/// Throws DomainError when the law's parameters are invalid.
void validate(const Distribution& dist);

double sample(const Distribution& dist, RandomStream& stream);

/// Silverman's rule of thumb, 0.9 * min(sigma, IQR/1.34) * n^(-1/5), with
/// sigma the population standard deviation and the IQR taken between
/// Tukey's hinges. All-equal input gets max(|x|, 1) * 1e-6.
double silverman_bandwidth(std::span<const double> observations);

/// Needs at least two observations.
Distribution fit_kde(std::vector<double> observations, bool truncate = true);

/// Density of the untruncated KDE.
double kde_pdf(const Kde& kde, double x);

}  // namespace chipcarbon
