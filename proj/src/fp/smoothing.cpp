#include "stochctl/fp/smoothing.hpp"

#include "stochctl/errors.hpp"

#include <cmath>

namespace stochctl::fp {

std::vector<double> box_smooth(std::span<const double> values, std::size_t half_width)
{
    const std::size_t n = values.size();
    std::vector<double> out(values.begin(), values.end());
    if (half_width == 0 || n == 0) {
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half_width ? i - half_width : 0;
        const std::size_t hi = std::min(n - 1, i + half_width);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            s += values[j];
        }
        out[i] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

Normalized normalize(std::span<const double> values, double spacing)
{
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    const double mass = s * spacing;
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw ZeroMass("density has no mass to normalize");
    }
    Normalized out{std::vector<double>(values.size()), mass};
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.density[i] = values[i] / mass;
    }
    return out;
}

double l1_distance(std::span<const double> a, std::span<const double> b, double spacing)
{
    if (a.size() != b.size()) {
        throw InvalidInput("L1 distance needs samples on the same grid");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
        s += w * std::abs(a[i] - b[i]);
    }
    return s * spacing;
}

} // namespace stochctl::fp
