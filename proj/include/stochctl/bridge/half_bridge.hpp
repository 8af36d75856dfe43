#pragma once

#include "stochctl/bridge/boundary.hpp"
#include "stochctl/bridge/heat.hpp"
#include "stochctl/sde/potential.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace stochctl::bridge {

/// Factor functions phi, phi_hat with p_t = phi_t phi_hat_t on every time slice.
struct HalfBridgeState {
    sde::TimeGrid grid{0.0, 1.0, 1};
    sde::UniformAxis axis{0.0, 1.0, 2};
    std::vector<std::vector<double>> phi;
    std::vector<std::vector<double>> phi_hat;
    std::vector<std::vector<double>> phi_error;
    std::vector<std::vector<double>> phi_hat_error;
    std::size_t iterations = 0;

    std::vector<double> density(std::size_t slice) const;
};

struct HalfBridgeResult {
    HalfBridgeState state;
    /// dU_t = -(2 / beta) d log phi_t, value table (2 / beta) V_t with V = -log phi.
    std::shared_ptr<sde::TabulatedDrift> drift;
    /// Trapezoid L1 distance of phi_T phi_hat_T to P_f after each iteration.
    std::vector<double> terminal_gap;
};

struct HalfBridgeOptions {
    std::size_t n_iters = 10;
    std::size_t n_paths = 5000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    /// Starting phi at t_start; defaults to 1.
    std::optional<std::vector<double>> initial_phi;
};

/// Alternating heat solves for the bridge factors. Throws ZeroDivision when a
/// boundary ratio needs a factor that vanished on the grid.
HalfBridgeResult half_bridge_iterate(const BoundaryPair& boundary, const sde::TimeGrid& grid,
                                     const sde::UniformAxis& axis, const sde::PhysicalParams& params,
                                     const HalfBridgeOptions& options);

} // namespace stochctl::bridge
