#include "stochctl/oracles/histogram.hpp"

#include "stochctl/errors.hpp"

#include <cmath>

namespace stochctl::oracles {

Histogram histogram_density(const sde::PotentialModel& potential, const InitialSampler& initial,
                            const sde::TimeGrid& grid, const sde::PhysicalParams& params, std::size_t n_paths,
                            std::size_t bins, double lo, double hi, std::uint64_t seed, double noise_scale)
{
    if (n_paths == 0) {
        throw EmptyEnsemble("histogram needs at least one path");
    }
    if (bins < 10 || !(hi > lo)) {
        throw InvalidInput("histogram needs at least 10 bins on a nonempty range");
    }
    if (potential.dim() != 1) {
        throw InvalidInput("histogram oracle is one dimensional");
    }
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    const double h = grid.step();
    const double sigma = noise_scale * std::sqrt(2.0 * params.mu * h / params.beta);
    Histogram out;
    out.lo = lo;
    out.hi = hi;
    out.counts.assign(bins, 0);
    out.density.assign(bins, 0.0);
    out.n_paths = n_paths;
    const double width = (hi - lo) / static_cast<double>(bins);
    double g = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        double q = initial(gen);
        for (std::size_t k = 0; k < grid.n_steps(); ++k) {
            const double t = grid.t_start() + static_cast<double>(k) * h;
            potential.gradient(t, std::span<const double>(&q, 1), std::span<double>(&g, 1));
            q += -params.mu * g * h + sigma * normal(gen);
        }
        if (q >= lo && q < hi) {
            ++out.counts[static_cast<std::size_t>((q - lo) / width)];
        }
    }
    for (std::size_t b = 0; b < bins; ++b) {
        out.density[b] = static_cast<double>(out.counts[b]) / (width * static_cast<double>(n_paths));
    }
    return out;
}

} // namespace stochctl::oracles
