#include "stochctl/bridge/boundary.hpp"

namespace stochctl::bridge {

BoundaryPair BoundaryPair::gibbs(std::shared_ptr<const sde::PotentialModel> u_initial,
                                 std::shared_ptr<const sde::PotentialModel> u_final, double beta, double lo, double hi,
                                 std::size_t n_nodes)
{
    sde::check_dim(*u_initial, 1);
    sde::check_dim(*u_final, 1);
    return {std::make_shared<fp::GibbsDensity>(std::move(u_initial), beta, lo, hi, n_nodes),
            std::make_shared<fp::GibbsDensity>(std::move(u_final), beta, lo, hi, n_nodes)};
}

BoundaryPair BoundaryPair::gaussian(double m0, double v0, double m1, double v1)
{
    return {std::make_shared<fp::GaussianDensity>(fp::GaussianDensity::isotropic({m0}, v0)),
            std::make_shared<fp::GaussianDensity>(fp::GaussianDensity::isotropic({m1}, v1))};
}

} // namespace stochctl::bridge
