#pragma once

#include "stochctl/bridge/network.hpp"
#include "stochctl/sde/potential.hpp"

#include <span>

namespace stochctl::bridge {

/// RMS of dU - (2 / beta) dV over paired samples (all components).
double stationarity_residual(std::span<const double> drift_gradient, std::span<const double> grad_v, double beta);

/// Same, with dU evaluated from `drift` at the batch rows (t, q) and dV given
/// as the batch targets.
double stationarity_residual(const sde::PotentialModel& drift, const TrainingBatch& grad_v, double beta);

} // namespace stochctl::bridge
