#pragma once

#include <span>
#include <vector>

namespace stochctl::bel {

/// Perturbation field for the degenerate (underdamped) gradient formula in the
/// momentum direction v over [t, t_f]:
///   l(u) = v (t_f - u)(t_f + 2t - 3u) / (t_f - t)^2
///   g(u) = v (t_f - u)^2 (u - t) / (m (t_f - t)^2)
///   h(u) = -l'(u) - l(u) / tau - H(u) g(u)
class VariationalField {
public:
    VariationalField(std::vector<double> v, double t, double t_f, double tau, double mass);

    std::vector<double> ell(double u) const;
    std::vector<double> ell_dot(double u) const;
    std::vector<double> g(double u) const;
    /// hessian is row-major d x d at the path position for time u.
    std::vector<double> h(double u, std::span<const double> hessian) const;

    double start() const { return t_; }
    double end() const { return t_f_; }

private:
    std::vector<double> v_;
    double t_, t_f_, tau_, mass_, inv_d2_;
};

VariationalField variational_field(std::vector<double> v, double t, double t_f, double tau, double mass);

} // namespace stochctl::bel
