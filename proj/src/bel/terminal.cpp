#include "stochctl/bel/terminal.hpp"

namespace stochctl::bel {

double bridge_cost_overdamped(const sde::PhysicalParams& p) { return p.beta * p.mu / 4.0; }

double bridge_cost_underdamped(const sde::PhysicalParams& p) { return p.beta * p.tau / (4.0 * p.mass); }

} // namespace stochctl::bel
