#include "stochctl/fp/density.hpp"

#include "stochctl/errors.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace stochctl::fp {

ConstantDensity::ConstantDensity(std::size_t dim, double c) : dim_(dim), log_c_(std::log(c))
{
    if (!(c > 0.0)) {
        throw InvalidInput("constant density must be positive");
    }
}

GaussianDensity::GaussianDensity(std::vector<double> mean, std::vector<double> covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance))
{
    const std::size_t d = mean_.size();
    if (d == 0 || cov_.size() != d * d) {
        throw InvalidInput("Gaussian covariance must be dim x dim");
    }
    chol_.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = cov_[i * d + j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= chol_[i * d + k] * chol_[j * d + k];
            }
            if (i == j) {
                if (!(s > 0.0)) {
                    throw InvalidInput("Gaussian covariance is not positive definite");
                }
                chol_[i * d + i] = std::sqrt(s);
            } else {
                chol_[i * d + j] = s / chol_[j * d + j];
            }
        }
    }
    double log_det = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        log_det += 2.0 * std::log(chol_[i * d + i]);
    }
    log_norm_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
}

GaussianDensity GaussianDensity::isotropic(std::vector<double> mean, double variance)
{
    const std::size_t d = mean.size();
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        cov[i * d + i] = variance;
    }
    return GaussianDensity(std::move(mean), std::move(cov));
}

double GaussianDensity::log_value(std::span<const double> x) const
{
    const std::size_t d = mean_.size();
    double quad = 0.0;
    double z[16];
    std::vector<double> big;
    double* y = z;
    if (d > 16) {
        big.resize(d);
        y = big.data();
    }
    for (std::size_t i = 0; i < d; ++i) {
        double s = x[i] - mean_[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= chol_[i * d + k] * y[k];
        }
        y[i] = s / chol_[i * d + i];
        quad += y[i] * y[i];
    }
    return log_norm_ - 0.5 * quad;
}

GibbsDensity::GibbsDensity(std::shared_ptr<const sde::PotentialModel> potential, double beta, double lo, double hi,
                           std::size_t n_nodes, double t)
    : u_(std::move(potential)), beta_(beta), t_(t)
{
    if (!u_ || u_->dim() != 1) {
        throw InvalidInput("Gibbs density needs a one dimensional potential");
    }
    if (n_nodes < 2 || !(hi > lo)) {
        throw InvalidInput("Gibbs quadrature needs hi > lo and at least two nodes");
    }
    const double dx = (hi - lo) / static_cast<double>(n_nodes - 1);
    std::vector<double> e(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double q = i + 1 == n_nodes ? hi : lo + static_cast<double>(i) * dx;
        e[i] = -beta_ * u_->value(t_, std::span<const double>(&q, 1));
    }
    const double top = *std::max_element(e.begin(), e.end());
    double z = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double w = (i == 0 || i + 1 == n_nodes) ? 0.5 : 1.0;
        z += w * std::exp(e[i] - top);
    }
    z *= dx;
    if (!(z > 0.0) || !std::isfinite(top)) {
        throw ZeroMass("Gibbs weight has no mass on the quadrature interval");
    }
    log_z_ = top + std::log(z);
}

double GibbsDensity::log_value(std::span<const double> x) const
{
    return -beta_ * u_->value(t_, x.first(1)) - log_z_;
}

ProductDensity::ProductDensity(std::shared_ptr<const Density> first, std::shared_ptr<const Density> second)
    : a_(std::move(first)), b_(std::move(second))
{
    if (!a_ || !b_) {
        throw InvalidInput("product density factor is empty");
    }
}

double ProductDensity::log_value(std::span<const double> x) const
{
    return a_->log_value(x.first(a_->dim())) + b_->log_value(x.subspan(a_->dim(), b_->dim()));
}

std::shared_ptr<Density> maxwell_boltzmann(std::size_t dim, double mass, double beta)
{
    return std::make_shared<GaussianDensity>(GaussianDensity::isotropic(std::vector<double>(dim, 0.0), mass / beta));
}

} // namespace stochctl::fp
