#pragma once

#include "stochctl/sde/params.hpp"

#include <functional>
#include <span>

namespace stochctl::bel {

/// Terminal condition phi and running cost F of the HJB problem. The running
/// cost is F_t(x) = control_cost * |dU_t(q)|^2 + running_cost(t, x); the first
/// term reuses the drift gradient already computed along the path.
struct TerminalData {
    std::function<double(std::span<const double>)> phi;
    std::function<double(double, std::span<const double>)> running_cost;
    double control_cost = 0.0;
};

/// Coefficient of |dU|^2 in the bridge (KL) running cost: beta mu / 4.
double bridge_cost_overdamped(const sde::PhysicalParams& p);
/// beta tau / (4 m) for the underdamped bridge.
double bridge_cost_underdamped(const sde::PhysicalParams& p);

} // namespace stochctl::bel
