#pragma once

#include "stochctl/fp/density.hpp"
#include "stochctl/sde/potential.hpp"

#include <memory>

namespace stochctl::bridge {

/// Initial and final marginals of a one dimensional bridge problem.
struct BoundaryPair {
    std::shared_ptr<const fp::Density> initial;
    std::shared_ptr<const fp::Density> final;

    /// e^{-beta U}/Z with Z from the trapezoid rule on [lo, hi].
    static BoundaryPair gibbs(std::shared_ptr<const sde::PotentialModel> u_initial,
                              std::shared_ptr<const sde::PotentialModel> u_final, double beta, double lo, double hi,
                              std::size_t n_nodes);
    static BoundaryPair gaussian(double m0, double v0, double m1, double v1);

    double p_initial(double q) const { return (*initial)(std::span<const double>(&q, 1)); }
    double p_final(double q) const { return (*final)(std::span<const double>(&q, 1)); }
};

} // namespace stochctl::bridge
