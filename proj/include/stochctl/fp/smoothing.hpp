#pragma once

#include <span>
#include <vector>

namespace stochctl::fp {

/// Moving average over 2*half_width+1 samples; windows are truncated and
/// renormalized at the edges.
std::vector<double> box_smooth(std::span<const double> values, std::size_t half_width);

struct Normalized {
    std::vector<double> density;
    double mass = 0.0; // sum(values) * spacing before normalization
};

/// Throws ZeroMass when the values sum to zero.
Normalized normalize(std::span<const double> values, double spacing);

/// Trapezoid L1 distance between two functions sampled on the same uniform grid.
double l1_distance(std::span<const double> a, std::span<const double> b, double spacing);

} // namespace stochctl::fp
