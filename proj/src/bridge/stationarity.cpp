#include "stochctl/bridge/stationarity.hpp"

#include "stochctl/errors.hpp"

#include <cmath>
#include <vector>

namespace stochctl::bridge {

double stationarity_residual(std::span<const double> drift_gradient, std::span<const double> grad_v, double beta)
{
    if (drift_gradient.size() != grad_v.size()) {
        throw InvalidInput("stationarity residual needs matching samples");
    }
    if (grad_v.empty()) {
        throw EmptyEnsemble("stationarity residual of an empty sample");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < grad_v.size(); ++i) {
        const double r = drift_gradient[i] - (2.0 / beta) * grad_v[i];
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(grad_v.size()));
}

double stationarity_residual(const sde::PotentialModel& drift, const TrainingBatch& grad_v, double beta)
{
    const std::size_t d = grad_v.dim;
    sde::check_dim(drift, d);
    std::vector<double> u(grad_v.size() * d);
    for (std::size_t i = 0; i < grad_v.size(); ++i) {
        drift.gradient(grad_v.t[i], std::span<const double>(grad_v.q).subspan(i * d, d),
                       std::span<double>(u).subspan(i * d, d));
    }
    return stationarity_residual(u, grad_v.target, beta);
}

} // namespace stochctl::bridge
