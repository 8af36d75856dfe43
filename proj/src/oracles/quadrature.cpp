#include "stochctl/oracles/quadrature.hpp"

#include "stochctl/errors.hpp"

#include <cmath>
#include <vector>

namespace stochctl::oracles {

EquilibriumDensity::EquilibriumDensity(std::shared_ptr<const sde::PotentialModel> potential, double beta,
                                       double log_z)
    : u_(std::move(potential)), beta_(beta), log_z_(log_z)
{
}

double EquilibriumDensity::operator()(double q) const
{
    return std::exp(-beta_ * u_->value(0.0, std::span<const double>(&q, 1)) - log_z_);
}

double EquilibriumDensity::normalizer() const { return std::exp(log_z_); }

EquilibriumDensity equilibrium_quadrature(std::shared_ptr<const sde::PotentialModel> potential, double beta,
                                          double lo, double hi, std::size_t n_nodes)
{
    if (!potential || potential->dim() != 1) {
        throw InvalidInput("equilibrium quadrature is one dimensional");
    }
    if (n_nodes < 2 || !(hi > lo)) {
        throw InvalidInput("quadrature needs hi > lo and at least two nodes");
    }
    const double dx = (hi - lo) / static_cast<double>(n_nodes - 1);
    std::vector<double> e(n_nodes);
    double top = -INFINITY;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double q = lo + static_cast<double>(i) * dx;
        e[i] = -beta * potential->value(0.0, std::span<const double>(&q, 1));
        top = std::max(top, e[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        s += (i == 0 || i + 1 == n_nodes ? 0.5 : 1.0) * std::exp(e[i] - top);
    }
    s *= dx;
    if (!(s > 0.0) || !std::isfinite(top)) {
        throw ZeroMass("Boltzmann weight has no mass on the interval");
    }
    return EquilibriumDensity(std::move(potential), beta, top + std::log(s));
}

} // namespace stochctl::oracles
