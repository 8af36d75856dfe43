#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stochctl::sde {

/// n equally spaced points on [lo, hi].
class UniformAxis {
public:
    UniformAxis(double lo, double hi, std::size_t n);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t size() const { return n_; }
    double spacing() const { return dx_; }
    double operator[](std::size_t j) const;
    std::vector<double> points() const;

    bool operator==(const UniformAxis&) const = default;

private:
    double lo_;
    double hi_;
    std::size_t n_;
    double dx_;
};

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes) on a
/// uniform axis. Constant extension outside the table.
class MonotoneCubic {
public:
    MonotoneCubic(UniformAxis axis, std::vector<double> values);

    double operator()(double x) const;
    double derivative(double x) const;

    const UniformAxis& axis() const { return axis_; }
    const std::vector<double>& values() const { return y_; }

private:
    UniformAxis axis_;
    std::vector<double> y_;
    std::vector<double> d_;
    double inv_dx_;
};

/// Centered differences, one-sided (second order) at the two ends.
std::vector<double> grid_derivative(std::span<const double> values, double spacing);

} // namespace stochctl::sde
