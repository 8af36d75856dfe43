#pragma once

#include "stochctl/bel/terminal.hpp"
#include "stochctl/sde/params.hpp"
#include "stochctl/sde/potential.hpp"
#include "stochctl/sde/simulate.hpp"
#include "stochctl/sde/stats.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stochctl::bel {

using sde::WeightedEstimate;

/// Value function queries at `time` (a grid node before t_end). Point j, path i
/// uses RandomStream(seed, j, i).
struct HjbQuery {
    std::vector<std::vector<double>> points;
    double time = 0.0;
    sde::DynamicsKind kind = sde::DynamicsKind::overdamped_forward;
    const sde::PotentialModel* potential = nullptr;
    TerminalData terminal;
    sde::TimeGrid grid{0.0, 1.0, 1};
    sde::PhysicalParams params;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    /// Overdamped gradient only: subtract phi at the start point from the
    /// payoff. The weight has mean zero, so the estimate stays unbiased while
    /// its variance no longer grows with the size of phi.
    bool centered_payoff = false;
};

/// E[phi(x_T) + sum_i h F(t_i, x_i)] over forward paths (Dynkin).
std::vector<WeightedEstimate> dynkin_value(const HjbQuery& query);

/// Gradient of the value function for overdamped dynamics; result[j][c] is
/// component c at point j. Needs at least two steps to t_end.
std::vector<std::vector<WeightedEstimate>> grad_value_overdamped(const HjbQuery& query);

enum class GradientDirection { momentum, position };

/// Directional derivative of the value function along (0, v) for underdamped
/// dynamics. Position directions throw Unsupported.
std::vector<WeightedEstimate> grad_value_underdamped(const HjbQuery& query, std::span<const double> v,
                                                     GradientDirection direction = GradientDirection::momentum);

/// d = 1 cocycle along a path: exp(-mu sum h U'') and the matching product of
/// (1 - mu h U'') factors, from node `first` to the end.
struct ScalarCocycle {
    double exponential;
    double product;
};
ScalarCocycle scalar_cocycle(const sde::Path& path, const sde::TimeGrid& grid, const sde::PotentialModel& potential,
                             double mu, std::size_t first = 0);

} // namespace stochctl::bel
