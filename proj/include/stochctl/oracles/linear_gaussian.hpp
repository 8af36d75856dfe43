#pragma once

#include "stochctl/sde/params.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>

namespace stochctl::oracles {

struct GaussianMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    double pdf(std::span<const double> x) const;
};

/// dx = A_t x dt + noise with covariance rate D (D = B B^T).
struct LinearGaussianSpec {
    std::function<Eigen::MatrixXd(double)> drift;
    Eigen::MatrixXd diffusion;
    Eigen::VectorXd mean0;
    Eigen::MatrixXd cov0;
    double t0 = 0.0;
    std::size_t rk4_steps = 10000;
};

/// Integrates the flow F' = A F and the noise part G' = A G + G A^T + D with
/// RK4; mean = F mean0, cov = F cov0 F^T + G.
GaussianMoments linear_gaussian_moments(const LinearGaussianSpec& spec, double t);

/// Overdamped Ornstein-Uhlenbeck process dq = -mu S_t q dt + sqrt(2 mu / beta) dw.
struct OUSpec {
    std::function<Eigen::MatrixXd(double)> stiffness;
    sde::PhysicalParams params;
    Eigen::VectorXd mean0;
    Eigen::MatrixXd cov0;
    double t0 = 0.0;
    std::size_t rk4_steps = 10000;
};

GaussianMoments ou_moments(const OUSpec& spec, double t);
double ou_density(const OUSpec& spec, double t, std::span<const double> q);

/// Linear underdamped system with U = q.K q / 2 in phase space (q, p).
LinearGaussianSpec underdamped_linear(const Eigen::MatrixXd& stiffness, const sde::PhysicalParams& params,
                                      const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0, double t0 = 0.0);

} // namespace stochctl::oracles
