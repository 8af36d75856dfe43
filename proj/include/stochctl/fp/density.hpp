#pragma once

#include "stochctl/sde/potential.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace stochctl::fp {

/// Probability density (or any nonnegative weight function) known through its log.
class Density {
public:
    virtual ~Density() = default;
    virtual std::size_t dim() const = 0;
    virtual double log_value(std::span<const double> x) const = 0;
    double operator()(std::span<const double> x) const { return std::exp(log_value(x)); }
};

/// Constant function c > 0 (c = 1 isolates the bare Girsanov factor).
class ConstantDensity final : public Density {
public:
    ConstantDensity(std::size_t dim, double c = 1.0);
    std::size_t dim() const override { return dim_; }
    double log_value(std::span<const double>) const override { return log_c_; }

private:
    std::size_t dim_;
    double log_c_;
};

class GaussianDensity final : public Density {
public:
    /// covariance is row-major and must be symmetric positive definite.
    GaussianDensity(std::vector<double> mean, std::vector<double> covariance);
    /// Isotropic shorthand.
    static GaussianDensity isotropic(std::vector<double> mean, double variance);

    std::size_t dim() const override { return mean_.size(); }
    double log_value(std::span<const double> x) const override;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& covariance() const { return cov_; }

private:
    std::vector<double> mean_;
    std::vector<double> cov_;
    std::vector<double> chol_; // lower factor, row-major
    double log_norm_ = 0.0;
};

/// e^{-beta U(q)} / Z in one dimension with Z by the trapezoid rule on [lo, hi].
class GibbsDensity final : public Density {
public:
    GibbsDensity(std::shared_ptr<const sde::PotentialModel> potential, double beta, double lo, double hi,
                 std::size_t n_nodes, double t = 0.0);

    std::size_t dim() const override { return 1; }
    double log_value(std::span<const double> x) const override;
    double log_normalizer() const { return log_z_; }
    const sde::PotentialModel& potential() const { return *u_; }

private:
    std::shared_ptr<const sde::PotentialModel> u_;
    double beta_;
    double t_;
    double log_z_ = 0.0;
};

/// rho(q) * sigma(p) on phase space x = (q, p).
class ProductDensity final : public Density {
public:
    ProductDensity(std::shared_ptr<const Density> first, std::shared_ptr<const Density> second);
    std::size_t dim() const override { return a_->dim() + b_->dim(); }
    double log_value(std::span<const double> x) const override;

private:
    std::shared_ptr<const Density> a_;
    std::shared_ptr<const Density> b_;
};

/// Maxwell-Boltzmann momentum law N(0, m/beta I).
std::shared_ptr<Density> maxwell_boltzmann(std::size_t dim, double mass, double beta);

} // namespace stochctl::fp
