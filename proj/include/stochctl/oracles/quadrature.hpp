#pragma once

#include "stochctl/sde/potential.hpp"

#include <cstddef>
#include <memory>

namespace stochctl::oracles {

/// q -> e^{-beta U(q)} / Z in one dimension, Z by the trapezoid rule.
class EquilibriumDensity {
public:
    EquilibriumDensity(std::shared_ptr<const sde::PotentialModel> potential, double beta, double log_z);

    double operator()(double q) const;
    double normalizer() const;
    double log_normalizer() const { return log_z_; }

private:
    std::shared_ptr<const sde::PotentialModel> u_;
    double beta_;
    double log_z_;
};

/// Throws ZeroMass if the weight has no mass on [lo, hi].
EquilibriumDensity equilibrium_quadrature(std::shared_ptr<const sde::PotentialModel> potential, double beta,
                                          double lo, double hi, std::size_t n_nodes);

} // namespace stochctl::oracles
