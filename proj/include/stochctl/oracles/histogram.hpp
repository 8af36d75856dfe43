#pragma once

#include "stochctl/sde/params.hpp"
#include "stochctl/sde/potential.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace stochctl::oracles {

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> density;
    std::vector<std::size_t> counts;
    std::size_t n_paths = 0;

    double width() const { return (hi - lo) / static_cast<double>(density.size()); }
    double center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * width(); }
};

using InitialSampler = std::function<double(std::mt19937_64&)>;

/// Forward Euler-Maruyama simulation of the one dimensional overdamped dynamics
/// from t_start to t_end, binned on [lo, hi]. noise_scale = 0 turns the noise off.
Histogram histogram_density(const sde::PotentialModel& potential, const InitialSampler& initial,
                            const sde::TimeGrid& grid, const sde::PhysicalParams& params, std::size_t n_paths,
                            std::size_t bins, double lo, double hi, std::uint64_t seed, double noise_scale = 1.0);

} // namespace stochctl::oracles
