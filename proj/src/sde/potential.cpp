#include "stochctl/sde/potential.hpp"

#include "stochctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stochctl::sde {

double PotentialModel::value(double, std::span<const double>) const
{
    throw Unsupported("this potential has no value, only a gradient");
}

void PotentialModel::hessian(double, std::span<const double>, std::span<double>) const
{
    throw Unsupported("this potential has no Hessian");
}

double PotentialModel::time_derivative(double, std::span<const double>) const
{
    throw Unsupported("this potential has no time derivative");
}

std::size_t check_dim(const PotentialModel& u, std::size_t expected)
{
    if (u.dim() != expected) {
        throw InvalidInput("potential dimension " + std::to_string(u.dim()) + " does not match " +
                           std::to_string(expected));
    }
    return expected;
}

void ZeroPotential::gradient(double, std::span<const double>, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
}

void ZeroPotential::hessian(double, std::span<const double>, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
}

QuadraticMatrix::QuadraticMatrix(std::size_t dim, std::vector<double> stiffness)
    : dim_(dim), constant_(true), fixed_(std::move(stiffness))
{
    if (fixed_.size() != dim * dim) {
        throw InvalidInput("stiffness matrix must have dim*dim entries");
    }
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (fixed_[i * dim + j] != fixed_[j * dim + i]) {
                throw InvalidInput("stiffness matrix must be symmetric");
            }
        }
    }
}

QuadraticMatrix::QuadraticMatrix(std::size_t dim, MatrixFn stiffness, MatrixFn rate)
    : dim_(dim), stiffness_(std::move(stiffness)), rate_(std::move(rate))
{
    if (!stiffness_) {
        throw InvalidInput("stiffness function is empty");
    }
}

std::vector<double> QuadraticMatrix::stiffness(double t) const
{
    if (constant_) {
        return fixed_;
    }
    auto s = stiffness_(t);
    if (s.size() != dim_ * dim_) {
        throw InvalidInput("stiffness function returned the wrong size");
    }
    return s;
}

double QuadraticMatrix::value(double t, std::span<const double> q) const
{
    const auto s = stiffness(t);
    double v = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            v += q[i] * s[i * dim_ + j] * q[j];
        }
    }
    return 0.5 * v;
}

void QuadraticMatrix::gradient(double t, std::span<const double> q, std::span<double> out) const
{
    const std::vector<double>& s = constant_ ? fixed_ : stiffness(t);
    for (std::size_t i = 0; i < dim_; ++i) {
        double g = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            g += s[i * dim_ + j] * q[j];
        }
        out[i] = g;
    }
}

void QuadraticMatrix::hessian(double t, std::span<const double>, std::span<double> out) const
{
    const auto s = stiffness(t);
    std::copy(s.begin(), s.end(), out.begin());
}

double QuadraticMatrix::time_derivative(double t, std::span<const double> q) const
{
    if (constant_) {
        return 0.0;
    }
    std::vector<double> r;
    if (rate_) {
        r = rate_(t);
    } else {
        const double e = 1e-6 * std::max(1.0, std::abs(t));
        const auto a = stiffness_(t + e);
        const auto b = stiffness_(t - e);
        r.resize(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            r[k] = (a[k] - b[k]) / (2 * e);
        }
    }
    double v = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            v += q[i] * r[i * dim_ + j] * q[j];
        }
    }
    return 0.5 * v;
}

double SeparablePotential::value(double, std::span<const double> q) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        v += f(q[i]);
    }
    return v;
}

void SeparablePotential::gradient(double, std::span<const double> q, std::span<double> out) const
{
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = df(q[i]);
    }
}

void SeparablePotential::hessian(double, std::span<const double> q, std::span<double> out) const
{
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(dim_ * dim_), 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i * dim_ + i] = d2f(q[i]);
    }
}

double QuarticShift::f(double x) const
{
    const double y = (x - 1.0) * (x - 1.0);
    return 0.25 * y * y;
}
double QuarticShift::df(double x) const
{
    const double y = x - 1.0;
    return y * y * y;
}
double QuarticShift::d2f(double x) const
{
    const double y = x - 1.0;
    return 3.0 * y * y;
}

double DoubleWell::f(double x) const
{
    const double y = x * x - 1.0;
    return 0.25 * y * y;
}
double DoubleWell::df(double x) const { return x * (x * x - 1.0); }
double DoubleWell::d2f(double x) const { return 3.0 * x * x - 1.0; }

double MonomialGrad::f(double x) const
{
    const double y = x * x;
    return 0.5 * y * y;
}
double MonomialGrad::df(double x) const { return 2.0 * x * x * x; }
double MonomialGrad::d2f(double x) const { return 6.0 * x * x; }

TabulatedDrift::TabulatedDrift(TimeGrid times, UniformAxis axis, std::vector<std::vector<double>> gradient,
                               std::vector<std::vector<double>> value)
    : times_(times), axis_(axis)
{
    if (gradient.size() != times.n_nodes()) {
        throw InvalidInput("tabulated drift needs one slice per time node");
    }
    if (!value.empty() && value.size() != times.n_nodes()) {
        throw InvalidInput("tabulated potential needs one slice per time node");
    }
    gradient_.reserve(gradient.size());
    for (auto& g : gradient) {
        gradient_.emplace_back(axis, std::move(g));
    }
    value_.reserve(value.size());
    for (auto& v : value) {
        value_.emplace_back(axis, std::move(v));
    }
}

void TabulatedDrift::locate(double t, std::size_t& k, double& w) const
{
    const double r = (t - times_.t_start()) / times_.step();
    const double n = static_cast<double>(times_.n_steps());
    if (!(r > 0.0)) {
        k = 0;
        w = 0.0;
        return;
    }
    if (!(r < n)) {
        k = times_.n_steps() - 1;
        w = 1.0;
        return;
    }
    double c = std::floor(r);
    const double rr = std::round(r);
    if (std::abs(r - rr) < 1e-9) {
        c = rr;
    }
    if (c >= n) {
        c = n - 1.0;
    }
    k = static_cast<std::size_t>(c);
    w = std::clamp(r - c, 0.0, 1.0);
}

double TabulatedDrift::value(double t, std::span<const double> q) const
{
    if (value_.empty()) {
        return PotentialModel::value(t, q);
    }
    std::size_t k;
    double w;
    locate(t, k, w);
    const double a = value_[k](q[0]);
    return w == 0.0 ? a : (1.0 - w) * a + w * value_[k + 1](q[0]);
}

void TabulatedDrift::gradient(double t, std::span<const double> q, std::span<double> out) const
{
    std::size_t k;
    double w;
    locate(t, k, w);
    const double a = gradient_[k](q[0]);
    out[0] = w == 0.0 ? a : (1.0 - w) * a + w * gradient_[k + 1](q[0]);
}

void TabulatedDrift::hessian(double t, std::span<const double> q, std::span<double> out) const
{
    std::size_t k;
    double w;
    locate(t, k, w);
    const double a = gradient_[k].derivative(q[0]);
    out[0] = w == 0.0 ? a : (1.0 - w) * a + w * gradient_[k + 1].derivative(q[0]);
}

double TabulatedDrift::time_derivative(double t, std::span<const double> q) const
{
    if (value_.empty()) {
        return PotentialModel::time_derivative(t, q);
    }
    std::size_t k;
    double w;
    locate(t, k, w);
    return (value_[k + 1](q[0]) - value_[k](q[0])) / times_.step();
}

} // namespace stochctl::sde
