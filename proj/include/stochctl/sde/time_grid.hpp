#pragma once

#include <cstddef>
#include <vector>

namespace stochctl::sde {

/// Uniform grid t_start = t_0 < ... < t_N = t_end. Node k is t_start + k*h.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_steps);

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double step() const { return h_; }
    double span() const { return t_end_ - t_start_; }

    /// Exact at k == n_steps (returns t_end).
    double node(std::size_t k) const;
    std::vector<double> nodes() const;

    /// Index of the node equal to t within 1e-9 of h; throws InvalidInput otherwise.
    std::size_t index_of(double t) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double t_start_;
    double t_end_;
    std::size_t n_steps_;
    double h_;
};

/// Grid over [t_start, t_end] with the given step. Throws NonIntegerSpan when the
/// span is not an integer multiple of step (1e-9 relative).
TimeGrid make_grid(double t_start, double t_end, double step);

} // namespace stochctl::sde
