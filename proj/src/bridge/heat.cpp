#include "stochctl/bridge/heat.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/sde/parallel.hpp"
#include "stochctl/sde/random.hpp"
#include "stochctl/sde/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stochctl::bridge {

namespace {

constexpr std::size_t point_block = 64;

} // namespace

const std::vector<double>& HeatField::at(std::size_t slice) const
{
    const auto it = std::find(slices.begin(), slices.end(), slice);
    if (it == slices.end()) {
        throw InvalidInput("heat field slice " + std::to_string(slice) + " was not computed");
    }
    return values[static_cast<std::size_t>(it - slices.begin())];
}

const std::vector<double>& HeatField::error_at(std::size_t slice) const
{
    const auto it = std::find(slices.begin(), slices.end(), slice);
    if (it == slices.end()) {
        throw InvalidInput("heat field slice " + std::to_string(slice) + " was not computed");
    }
    return std_error[static_cast<std::size_t>(it - slices.begin())];
}

HeatField heat_mc_solve(HeatDirection direction, const GridFunction& boundary, const sde::TimeGrid& grid,
                        const sde::PhysicalParams& params, std::size_t n_paths, std::uint64_t seed,
                        std::span<const std::size_t> slices, std::size_t workers)
{
    params.validate();
    if (n_paths == 0) {
        throw EmptyEnsemble("heat solve needs at least one sample");
    }
    if (boundary.values.size() != boundary.axis.size()) {
        throw InvalidInput("boundary values do not match the spatial axis");
    }
    for (double v : boundary.values) {
        if (!std::isfinite(v)) {
            throw NonFiniteState("heat solve boundary data is not finite");
        }
    }

    HeatField out{grid, boundary.axis, {}, {}, {}};
    if (slices.empty()) {
        out.slices.resize(grid.n_nodes());
        std::iota(out.slices.begin(), out.slices.end(), std::size_t{0});
    } else {
        out.slices.assign(slices.begin(), slices.end());
    }

    const sde::MonotoneCubic f(boundary.axis, boundary.values);
    const std::size_t n_x = boundary.axis.size();
    const boost::math::normal_distribution<double> standard;
    const double origin = direction == HeatDirection::forward ? grid.t_start() : grid.t_end();
    const std::size_t n_blocks = (n_x + point_block - 1) / point_block;

    std::vector<double> z(n_paths);
    for (std::size_t k : out.slices) {
        if (k >= grid.n_nodes()) {
            throw InvalidInput("heat solve slice out of range");
        }
        const double s = std::abs(grid.node(k) - origin);
        std::vector<double> values(n_x);
        std::vector<double> errors(n_x, 0.0);
        if (s == 0.0) {
            values = boundary.values;
        } else {
            const double sigma = std::sqrt(2.0 * params.mu * s / params.beta);
            const double n = static_cast<double>(n_paths);
            for (std::size_t i = 0; i < n_paths; ++i) {
                sde::RandomStream rs(seed, k, i);
                const double u = std::clamp((static_cast<double>(i) + rs.uniform()) / n, 1e-300, 1.0 - 1e-16);
                z[i] = sigma * boost::math::quantile(standard, u);
            }
            sde::parallel_for(n_blocks, workers, [&](std::size_t b) {
                const std::size_t last = std::min(n_x, (b + 1) * point_block);
                for (std::size_t j = b * point_block; j < last; ++j) {
                    const double x = boundary.axis[j];
                    sde::RunningMoments m;
                    for (double dz : z) {
                        m.add(f(x + dz));
                    }
                    if (!std::isfinite(m.mean)) {
                        throw NonFiniteState("heat solve produced a non-finite value at q = " + std::to_string(x));
                    }
                    values[j] = m.mean;
                    errors[j] = m.std_error();
                }
            });
        }
        out.values.push_back(std::move(values));
        out.std_error.push_back(std::move(errors));
    }
    return out;
}

} // namespace stochctl::bridge
