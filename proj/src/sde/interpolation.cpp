#include "stochctl/sde/interpolation.hpp"

#include "stochctl/errors.hpp"

#include <cmath>

namespace stochctl::sde {

UniformAxis::UniformAxis(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi), n_(n), dx_(0.0)
{
    if (n < 2 || !(hi > lo)) {
        throw InvalidInput("uniform axis needs hi > lo and at least two points");
    }
    dx_ = (hi - lo) / static_cast<double>(n - 1);
}

double UniformAxis::operator[](std::size_t j) const
{
    return j + 1 == n_ ? hi_ : lo_ + static_cast<double>(j) * dx_;
}

std::vector<double> UniformAxis::points() const
{
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        out[j] = (*this)[j];
    }
    return out;
}

namespace {
double sign(double x) { return (x > 0.0) - (x < 0.0); }

double end_slope(double d0, double d1)
{
    double s = 0.5 * (3.0 * d0 - d1);
    if (sign(s) != sign(d0)) {
        s = 0.0;
    } else if (sign(d0) != sign(d1) && std::abs(s) > std::abs(3.0 * d0)) {
        s = 3.0 * d0;
    }
    return s;
}
} // namespace

MonotoneCubic::MonotoneCubic(UniformAxis axis, std::vector<double> values)
    : axis_(axis), y_(std::move(values)), inv_dx_(1.0 / axis.spacing())
{
    const std::size_t n = y_.size();
    if (n != axis_.size()) {
        throw InvalidInput("interpolation table does not match its axis");
    }
    std::vector<double> delta(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        delta[j] = (y_[j + 1] - y_[j]) * inv_dx_;
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double a = delta[j - 1];
        const double b = delta[j];
        d_[j] = (a * b <= 0.0) ? 0.0 : 2.0 / (1.0 / a + 1.0 / b);
    }
    d_[0] = end_slope(delta[0], delta[1]);
    d_[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
}

namespace {
// Cell index and local coordinate in [0, 1]. Points within round-off of a
// node land exactly on it.
inline bool locate(const UniformAxis& ax, double inv_dx, double x, std::size_t& j, double& s)
{
    double r = (x - ax.lo()) * inv_dx;
    const double last = static_cast<double>(ax.size() - 1);
    if (!(r > 0.0) || !(r < last)) {
        return false;
    }
    const double rr = std::round(r);
    if (std::abs(r - rr) < 1e-12 * std::max(1.0, rr)) {
        r = rr;
    }
    double c = std::floor(r);
    if (c >= last) {
        c = last - 1.0;
    }
    j = static_cast<std::size_t>(c);
    s = r - c;
    return true;
}
} // namespace

double MonotoneCubic::operator()(double x) const
{
    std::size_t j;
    double s;
    if (!locate(axis_, inv_dx_, x, j, s)) {
        if (std::isnan(x)) {
            return x;
        }
        return x <= axis_.lo() ? y_.front() : y_.back();
    }
    if (s == 0.0 || (y_[j] == y_[j + 1] && d_[j] == 0.0 && d_[j + 1] == 0.0)) {
        return y_[j];
    }
    const double dx = axis_.spacing();
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y_[j] + (s3 - 2 * s2 + s) * dx * d_[j] + (3 * s2 - 2 * s3) * y_[j + 1] +
           (s3 - s2) * dx * d_[j + 1];
}

double MonotoneCubic::derivative(double x) const
{
    std::size_t j;
    double s;
    if (!locate(axis_, inv_dx_, x, j, s)) {
        return 0.0;
    }
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * y_[j] + (6 * s - 6 * s2) * y_[j + 1]) * inv_dx_ + (3 * s2 - 4 * s + 1) * d_[j] +
           (3 * s2 - 2 * s) * d_[j + 1];
}

std::vector<double> grid_derivative(std::span<const double> v, double spacing)
{
    const std::size_t n = v.size();
    if (n < 2) {
        throw InvalidInput("derivative needs at least two samples");
    }
    std::vector<double> out(n);
    if (n == 2) {
        out[0] = out[1] = (v[1] - v[0]) / spacing;
        return out;
    }
    const double inv = 0.5 / spacing;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        out[j] = (v[j + 1] - v[j - 1]) * inv;
    }
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv;
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) * inv;
    return out;
}

} // namespace stochctl::sde
