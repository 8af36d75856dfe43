#pragma once

#include <cstddef>

namespace stochctl::sde {

struct PhysicalParams {
    double beta = 1.0;
    double mu = 1.0;
    double tau = 1.0;
    double mass = 1.0;
    std::size_t dim = 1;

    /// Throws InvalidInput naming the first offending field.
    void validate() const;
};

} // namespace stochctl::sde
