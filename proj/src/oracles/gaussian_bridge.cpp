#include "stochctl/oracles/gaussian_bridge.hpp"

#include "stochctl/errors.hpp"

#include <cmath>
#include <numbers>

namespace stochctl::oracles {

GaussianBridge::GaussianBridge(double m0, double v0, double m1, double v1, const sde::PhysicalParams& params,
                               double horizon, double t0)
    : m0_(m0), v0_(v0), m1_(m1), v1_(v1), rate_(2.0 * params.mu / params.beta), t0_(t0), horizon_(horizon)
{
    if (!(v0 > 0.0) || !(v1 > 0.0) || !(horizon > 0.0)) {
        throw InvalidInput("Gaussian bridge needs positive variances and horizon");
    }
    const double eps = rate_ * horizon;
    // The entropic coupling has precision off-diagonal -1/eps, which fixes c.
    c_ = 0.5 * (-eps + std::sqrt(eps * eps + 4.0 * v0 * v1));
    const double det = v0 * v1 - c_ * c_;
    const double p00 = v1 / det;
    const double p11 = v0 / det;
    const double p01 = -c_ / det;
    a_ = p00 - 1.0 / eps;
    b_ = p11 - 1.0 / eps;
    alpha_ = p00 * m0 + p01 * m1;
    gamma_ = p01 * m0 + p11 * m1;
}

GaussianBridge::Moments GaussianBridge::moments(double t) const
{
    const double r = (t - t0_) / horizon_;
    const double s = 1.0 - r;
    const double eps = rate_ * horizon_;
    return {s * m0_ + r * m1_, s * s * v0_ + r * r * v1_ + 2.0 * r * s * c_ + eps * r * s};
}

namespace {
// log of the heat flow (variance w) of exp(-k x^2 / 2 + l x)
double log_heat(double k, double l, double w, double x)
{
    if (!(k > 0.0)) {
        throw Unsupported("bridge factor is not a normalizable Gaussian");
    }
    const double var = 1.0 / k + w;
    const double m = l / k;
    return 0.5 * std::log(2.0 * std::numbers::pi / k) + l * l / (2.0 * k) - 0.5 * std::log(2.0 * std::numbers::pi * var) -
           (x - m) * (x - m) / (2.0 * var);
}
} // namespace

double GaussianBridge::log_phi(double t, double x) const
{
    return log_heat(b_, gamma_, rate_ * (t0_ + horizon_ - t), x);
}

double GaussianBridge::log_phi_hat(double t, double x) const { return log_heat(a_, alpha_, rate_ * (t - t0_), x); }

} // namespace stochctl::oracles
