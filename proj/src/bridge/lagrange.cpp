#include "stochctl/bridge/lagrange.hpp"

#include "stochctl/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace stochctl::bridge {

namespace {

double clenshaw(const std::vector<double>& c, double z)
{
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2.0 * z * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return z * b1 - b2 + c[0];
}

void check_interval(double lo, double hi)
{
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidInput("lagrange multiplier needs a finite interval lo < hi");
    }
}

} // namespace

LagrangeMultiplier::LagrangeMultiplier(double lo, double hi, std::size_t degree)
    : lo_(lo), hi_(hi), c_(degree + 1, 0.0)
{
    check_interval(lo, hi);
}

LagrangeMultiplier::LagrangeMultiplier(double lo, double hi, std::vector<double> chebyshev_coefficients)
    : lo_(lo), hi_(hi), c_(std::move(chebyshev_coefficients))
{
    check_interval(lo, hi);
    if (c_.empty()) {
        throw InvalidInput("lagrange multiplier needs at least one coefficient");
    }
}

LagrangeMultiplier LagrangeMultiplier::fit(std::span<const double> points, std::span<const double> values, double lo,
                                           double hi, std::size_t degree)
{
    check_interval(lo, hi);
    if (points.size() != values.size()) {
        throw InvalidInput("fit points and values differ in length");
    }
    const std::size_t n = points.size();
    const std::size_t m = degree + 1;
    if (n < m) {
        throw IllConditionedFit("polynomial fit of degree " + std::to_string(degree) + " needs at least " +
                                std::to_string(m) + " points");
    }
    LagrangeMultiplier out(lo, hi, degree);
    Eigen::MatrixXd a(n, m);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(values[i]) || !std::isfinite(points[i])) {
            throw NonFiniteState("polynomial fit data is not finite");
        }
        const double z = out.scaled(points[i]);
        a(i, 0) = 1.0;
        if (m > 1) {
            a(i, 1) = z;
        }
        for (std::size_t k = 2; k < m; ++k) {
            a(i, k) = 2.0 * z * a(i, k - 1) - a(i, k - 2);
        }
        y(i) = values[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) < m) {
        throw IllConditionedFit("polynomial fit design has rank " + std::to_string(qr.rank()) + " < " +
                                std::to_string(m));
    }
    const Eigen::VectorXd c = qr.solve(y);
    for (std::size_t k = 0; k < m; ++k) {
        out.c_[k] = c(k);
    }
    return out;
}

double LagrangeMultiplier::operator()(double q) const { return clenshaw(c_, scaled(q)); }

double LagrangeMultiplier::derivative(double q) const
{
    const std::size_t n = c_.size();
    if (n < 2) {
        return 0.0;
    }
    std::vector<double> d(n - 1, 0.0);
    for (std::size_t k = n - 1; k >= 1; --k) {
        d[k - 1] = 2.0 * static_cast<double>(k) * c_[k] + (k + 1 < n - 1 ? d[k + 1] : 0.0);
    }
    d[0] *= 0.5;
    return clenshaw(d, scaled(q)) * 2.0 / (hi_ - lo_);
}

std::vector<double> LagrangeMultiplier::monomial_coefficients() const
{
    const std::size_t n = c_.size();
    // Chebyshev polynomials in z as monomials in z.
    std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
    t[0][0] = 1.0;
    if (n > 1) {
        t[1][1] = 1.0;
    }
    for (std::size_t k = 2; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            t[k][j] = -t[k - 2][j] + (j > 0 ? 2.0 * t[k - 1][j - 1] : 0.0);
        }
    }
    std::vector<double> in_z(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            in_z[j] += c_[k] * t[k][j];
        }
    }
    // z = a q + b; expand z^j binomially.
    const double a = 2.0 / (hi_ - lo_);
    const double b = -(lo_ + hi_) / (hi_ - lo_);
    std::vector<double> out(n, 0.0);
    std::vector<double> power{1.0}; // coefficients of z^j in q
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < power.size(); ++i) {
            out[i] += in_z[j] * power[i];
        }
        std::vector<double> next(power.size() + 1, 0.0);
        for (std::size_t i = 0; i < power.size(); ++i) {
            next[i] += b * power[i];
            next[i + 1] += a * power[i];
        }
        power = std::move(next);
    }
    return out;
}

LagrangeMultiplier lambda_update(const LagrangeMultiplier& lambda, std::span<const double> points,
                                 std::span<const double> p_estimate, std::span<const double> p_target, double rate)
{
    if (points.size() != p_estimate.size() || points.size() != p_target.size()) {
        throw InvalidInput("lambda update inputs differ in length");
    }
    std::vector<double> values(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double p = std::max(p_estimate[i], density_floor);
        const double target = std::max(p_target[i], density_floor);
        values[i] = lambda(points[i]) + rate * std::log(p / target);
    }
    return LagrangeMultiplier::fit(points, values, lambda.lo(), lambda.hi(), lambda.degree());
}

} // namespace stochctl::bridge
