#pragma once

#include "stochctl/sde/stats.hpp"

#include <functional>
#include <span>
#include <vector>

namespace stochctl::oracles {

using EstimateFn = std::function<sde::WeightedEstimate(std::span<const double>)>;

/// Central differences per component with error sqrt(se+^2 + se-^2) / (2 step).
std::vector<sde::WeightedEstimate> finite_diff_gradient(const EstimateFn& f, std::span<const double> x, double step);

} // namespace stochctl::oracles
