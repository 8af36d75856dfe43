#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stochctl::bridge {

/// Polynomial lambda(q) of fixed degree on a fit interval, held in the
/// Chebyshev basis of the interval's scaled variable. Evaluation outside the
/// interval extends the polynomial.
class LagrangeMultiplier {
public:
    /// The zero polynomial.
    explicit LagrangeMultiplier(double lo = -3.0, double hi = 3.0, std::size_t degree = 6);
    LagrangeMultiplier(double lo, double hi, std::vector<double> chebyshev_coefficients);

    /// Least squares fit; throws IllConditionedFit when the design is rank deficient.
    static LagrangeMultiplier fit(std::span<const double> points, std::span<const double> values, double lo,
                                  double hi, std::size_t degree = 6);

    double operator()(double q) const;
    double derivative(double q) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t degree() const { return c_.size() - 1; }
    const std::vector<double>& coefficients() const { return c_; }
    /// Coefficients of 1, q, q^2, ... in the original variable.
    std::vector<double> monomial_coefficients() const;

private:
    double scaled(double q) const { return (2.0 * q - lo_ - hi_) / (hi_ - lo_); }

    double lo_;
    double hi_;
    std::vector<double> c_;
};

/// Floor applied to both densities inside the log ratio.
inline constexpr double density_floor = 1e-12;

/// Refit lambda_old(q_i) + rate * log(p_i / P_i) on the same interval and degree.
LagrangeMultiplier lambda_update(const LagrangeMultiplier& lambda, std::span<const double> points,
                                 std::span<const double> p_estimate, std::span<const double> p_target, double rate);

} // namespace stochctl::bridge
