#pragma once

#include "stochctl/sde/params.hpp"

namespace stochctl::oracles {

/// Schroedinger bridge between N(m0, v0) at t0 and N(m1, v1) at t0 + horizon
/// for the free diffusion prior with variance rate 2 mu / beta (one dimension).
class GaussianBridge {
public:
    GaussianBridge(double m0, double v0, double m1, double v1, const sde::PhysicalParams& params, double horizon,
                   double t0 = 0.0);

    struct Moments {
        double mean;
        double variance;
    };
    Moments moments(double t) const;
    /// Covariance of the endpoint pair.
    double endpoint_covariance() const { return c_; }

    /// Log of the factor functions, up to one shared constant, so that
    /// phi_t * phi_hat_t is the bridge marginal. Requires the terminal factor
    /// to be a normalizable Gaussian; throws Unsupported otherwise.
    double log_phi(double t, double x) const;
    double log_phi_hat(double t, double x) const;

private:
    double m0_, v0_, m1_, v1_;
    double rate_; // 2 mu / beta
    double t0_, horizon_;
    double c_;
    double a_, alpha_, b_, gamma_; // log phi_hat_0 = -a x^2/2 + alpha x, log phi_1 = -b x^2/2 + gamma x
};

} // namespace stochctl::oracles
