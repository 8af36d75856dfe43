#include "stochctl/sde/time_grid.hpp"

#include "stochctl/errors.hpp"

#include <cmath>
#include <sstream>

namespace stochctl::sde {

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t n_steps)
    : t_start_(t_start), t_end_(t_end), n_steps_(n_steps), h_(0.0)
{
    if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end)) {
        throw InvalidInput("time grid needs t_end > t_start");
    }
    if (n_steps == 0) {
        throw InvalidInput("time grid needs at least one step");
    }
    h_ = (t_end - t_start) / static_cast<double>(n_steps);
}

double TimeGrid::node(std::size_t k) const
{
    if (k == n_steps_) {
        return t_end_;
    }
    if (k > n_steps_) {
        throw InvalidInput("time grid node out of range");
    }
    return t_start_ + static_cast<double>(k) * h_;
}

std::vector<double> TimeGrid::nodes() const
{
    std::vector<double> out(n_nodes());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = node(k);
    }
    return out;
}

std::size_t TimeGrid::index_of(double t) const
{
    const double r = (t - t_start_) / h_;
    const double k = std::round(r);
    if (k < 0 || k > static_cast<double>(n_steps_) || std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(k))) {
        std::ostringstream msg;
        msg << "time " << t << " is not a node of the grid [" << t_start_ << ", " << t_end_ << "] with step " << h_;
        throw InvalidInput(msg.str());
    }
    return static_cast<std::size_t>(k);
}

TimeGrid make_grid(double t_start, double t_end, double step)
{
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw InvalidInput("grid step must be positive");
    }
    if (!(t_end > t_start)) {
        throw InvalidInput("grid needs t_end > t_start");
    }
    const double r = (t_end - t_start) / step;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * n) {
        std::ostringstream msg;
        msg << "span " << (t_end - t_start) << " is not an integer multiple of step " << step;
        throw NonIntegerSpan(msg.str());
    }
    return TimeGrid(t_start, t_end, static_cast<std::size_t>(n));
}

} // namespace stochctl::sde
