#pragma once

#include "stochctl/fp/density.hpp"
#include "stochctl/sde/params.hpp"
#include "stochctl/sde/potential.hpp"
#include "stochctl/sde/stats.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstdint>
#include <vector>

namespace stochctl::fp {

using sde::WeightedEstimate;

struct DensityQuery {
    std::vector<std::vector<double>> eval_points;
    double eval_time = 0.0;
    const Density* initial_density = nullptr;
    std::size_t n_paths = 1;
    sde::TimeGrid grid{0.0, 1.0, 1};
    sde::PhysicalParams params;
    const sde::PotentialModel* potential = nullptr;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Overdamped density p_t(q) from backward free paths with a Girsanov weight.
/// Point j, path i uses RandomStream(seed, j, i).
std::vector<WeightedEstimate> density_overdamped(const DensityQuery& query);

/// Underdamped density p_t(q, p) on phase space; points are (q..., p...).
std::vector<WeightedEstimate> density_underdamped(const DensityQuery& query);

} // namespace stochctl::fp
