#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace stochctl::sde {

/// Welford accumulator with Chan's pairwise merge.
struct RunningMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningMoments& other);
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double std_error() const;
};

/// Moments of e^{x} for samples given by their logarithm x. Values are kept
/// relative to the largest log seen, so huge or tiny weights do not overflow.
struct LogMoments {
    std::size_t n = 0;
    double log_scale = -std::numeric_limits<double>::infinity();
    double mean = 0.0; // of e^{x - log_scale}
    double m2 = 0.0;

    void add(double log_value);
    void merge(const LogMoments& other);

    /// Mean on the natural scale. Throws DegenerateWeight if it cannot be represented.
    double value() const;
    double std_error() const;
    double log_value() const;
};

/// Monte Carlo mean with its standard error and sample count. mean_weight is
/// the sample mean of the bare Radon-Nikodym factor where one exists (NaN otherwise),
/// with weight_std_error its standard error.
struct WeightedEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double mean_weight = std::numeric_limits<double>::quiet_NaN();
    double weight_std_error = std::numeric_limits<double>::quiet_NaN();

    static WeightedEstimate from(const RunningMoments& m);
};

} // namespace stochctl::sde
