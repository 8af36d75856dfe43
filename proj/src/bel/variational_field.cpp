#include "stochctl/bel/variational_field.hpp"

#include "stochctl/errors.hpp"

namespace stochctl::bel {

VariationalField::VariationalField(std::vector<double> v, double t, double t_f, double tau, double mass)
    : v_(std::move(v)), t_(t), t_f_(t_f), tau_(tau), mass_(mass), inv_d2_(0.0)
{
    if (t_f == t) {
        throw DegenerateHorizon("variational field needs t_f > t");
    }
    if (t_f < t) {
        throw InvalidInput("variational field needs t_f > t");
    }
    inv_d2_ = 1.0 / ((t_f - t) * (t_f - t));
}

std::vector<double> VariationalField::ell(double u) const
{
    const double c = (t_f_ - u) * (t_f_ + 2.0 * t_ - 3.0 * u) * inv_d2_;
    std::vector<double> out(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) {
        out[i] = c * v_[i];
    }
    return out;
}

std::vector<double> VariationalField::ell_dot(double u) const
{
    const double c = (6.0 * u - 4.0 * t_f_ - 2.0 * t_) * inv_d2_;
    std::vector<double> out(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) {
        out[i] = c * v_[i];
    }
    return out;
}

std::vector<double> VariationalField::g(double u) const
{
    const double c = (t_f_ - u) * (t_f_ - u) * (u - t_) * inv_d2_ / mass_;
    std::vector<double> out(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) {
        out[i] = c * v_[i];
    }
    return out;
}

std::vector<double> VariationalField::h(double u, std::span<const double> hessian) const
{
    const std::size_t d = v_.size();
    const auto l = ell(u);
    const auto ld = ell_dot(u);
    const auto gg = g(u);
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        double hg = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            hg += hessian[i * d + k] * gg[k];
        }
        out[i] = -ld[i] - l[i] / tau_ - hg;
    }
    return out;
}

VariationalField variational_field(std::vector<double> v, double t, double t_f, double tau, double mass)
{
    return VariationalField(std::move(v), t, t_f, tau, mass);
}

} // namespace stochctl::bel
