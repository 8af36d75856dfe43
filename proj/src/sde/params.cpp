#include "stochctl/sde/params.hpp"

#include "stochctl/errors.hpp"

#include <cmath>
#include <string>

namespace stochctl::sde {

namespace {
void positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidInput(std::string(name) + " must be finite and > 0");
    }
}
} // namespace

void PhysicalParams::validate() const
{
    positive(beta, "beta");
    positive(mu, "mu");
    positive(tau, "tau");
    positive(mass, "mass");
    if (dim < 1) {
        throw InvalidInput("dim must be >= 1");
    }
}

} // namespace stochctl::sde
