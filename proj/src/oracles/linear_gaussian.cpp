#include "stochctl/oracles/linear_gaussian.hpp"

#include "stochctl/errors.hpp"

#include <cmath>
#include <numbers>

namespace stochctl::oracles {

double GaussianMoments::pdf(std::span<const double> x) const
{
    const auto d = mean.size();
    Eigen::VectorXd r(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        r[i] = x[i] - mean[i];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw InvalidInput("covariance is not positive definite");
    }
    const Eigen::VectorXd y = llt.matrixL().solve(r);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return std::exp(-0.5 * y.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(d) * std::log(2 * std::numbers::pi));
}

GaussianMoments linear_gaussian_moments(const LinearGaussianSpec& s, double t)
{
    const auto d = s.mean0.size();
    if (t < s.t0) {
        throw InvalidInput("oracle time precedes the initial time");
    }
    Eigen::MatrixXd f = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
    if (t > s.t0) {
        const double h = (t - s.t0) / static_cast<double>(s.rk4_steps);
        auto rhs = [&](double u, const Eigen::MatrixXd& ff, const Eigen::MatrixXd& gg, Eigen::MatrixXd& df,
                       Eigen::MatrixXd& dg) {
            const Eigen::MatrixXd a = s.drift(u);
            df = a * ff;
            dg = a * gg + gg * a.transpose() + s.diffusion;
        };
        Eigen::MatrixXd k1f, k1g, k2f, k2g, k3f, k3g, k4f, k4g;
        for (std::size_t i = 0; i < s.rk4_steps; ++i) {
            const double u = s.t0 + static_cast<double>(i) * h;
            rhs(u, f, g, k1f, k1g);
            rhs(u + 0.5 * h, f + 0.5 * h * k1f, g + 0.5 * h * k1g, k2f, k2g);
            rhs(u + 0.5 * h, f + 0.5 * h * k2f, g + 0.5 * h * k2g, k3f, k3g);
            rhs(u + h, f + h * k3f, g + h * k3g, k4f, k4g);
            f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
            g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
        }
    }
    GaussianMoments m;
    m.mean = f * s.mean0;
    m.cov = f * s.cov0 * f.transpose() + g;
    m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
    return m;
}

GaussianMoments ou_moments(const OUSpec& spec, double t)
{
    const auto d = spec.mean0.size();
    LinearGaussianSpec s;
    const double mu = spec.params.mu;
    auto stiffness = spec.stiffness;
    s.drift = [stiffness, mu](double u) { return Eigen::MatrixXd(-mu * stiffness(u)); };
    s.diffusion = (2.0 * mu / spec.params.beta) * Eigen::MatrixXd::Identity(d, d);
    s.mean0 = spec.mean0;
    s.cov0 = spec.cov0;
    s.t0 = spec.t0;
    s.rk4_steps = spec.rk4_steps;
    return linear_gaussian_moments(s, t);
}

double ou_density(const OUSpec& spec, double t, std::span<const double> q) { return ou_moments(spec, t).pdf(q); }

LinearGaussianSpec underdamped_linear(const Eigen::MatrixXd& stiffness, const sde::PhysicalParams& p,
                                      const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0, double t0)
{
    const auto d = stiffness.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    a.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d) / p.mass;
    a.bottomLeftCorner(d, d) = -stiffness;
    a.bottomRightCorner(d, d) = -Eigen::MatrixXd::Identity(d, d) / p.tau;
    LinearGaussianSpec s;
    s.drift = [a](double) { return a; };
    s.diffusion = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    s.diffusion.bottomRightCorner(d, d) = (2.0 * p.mass / (p.tau * p.beta)) * Eigen::MatrixXd::Identity(d, d);
    s.mean0 = mean0;
    s.cov0 = cov0;
    s.t0 = t0;
    return s;
}

} // namespace stochctl::oracles
