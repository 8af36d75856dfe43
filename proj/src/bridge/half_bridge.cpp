#include "stochctl/bridge/half_bridge.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/fp/smoothing.hpp"
#include "stochctl/sde/random.hpp"

#include <cmath>
#include <string>

namespace stochctl::bridge {

namespace {

std::vector<double> ratio(const std::vector<double>& num, const std::vector<double>& den, const sde::UniformAxis& axis,
                          const char* what)
{
    std::vector<double> out(num.size());
    for (std::size_t j = 0; j < num.size(); ++j) {
        if (!(den[j] > 0.0) || !std::isfinite(den[j])) {
            throw ZeroDivision(std::string(what) + " vanished at q = " + std::to_string(axis[j]) +
                               "; widen the spatial grid");
        }
        out[j] = num[j] / den[j];
    }
    return out;
}

} // namespace

std::vector<double> HalfBridgeState::density(std::size_t slice) const
{
    std::vector<double> out(axis.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = phi[slice][j] * phi_hat[slice][j];
    }
    return out;
}

HalfBridgeResult half_bridge_iterate(const BoundaryPair& boundary, const sde::TimeGrid& grid,
                                     const sde::UniformAxis& axis, const sde::PhysicalParams& params,
                                     const HalfBridgeOptions& options)
{
    if (options.n_iters == 0) {
        throw InvalidInput("half bridge needs at least one iteration");
    }
    params.validate();
    if (params.dim != 1) {
        throw Unsupported("half bridge is one dimensional");
    }
    const std::size_t n_x = axis.size();
    const std::size_t last = grid.n_steps();
    std::vector<double> p_initial(n_x);
    std::vector<double> p_final(n_x);
    for (std::size_t j = 0; j < n_x; ++j) {
        p_initial[j] = boundary.p_initial(axis[j]);
        p_final[j] = boundary.p_final(axis[j]);
    }

    std::vector<double> phi_start(n_x, 1.0);
    if (options.initial_phi) {
        if (options.initial_phi->size() != n_x) {
            throw InvalidInput("initial phi does not match the spatial grid");
        }
        phi_start = *options.initial_phi;
    }

    const std::size_t only_start[] = {0};
    const std::size_t only_end[] = {last};
    auto solve = [&](HeatDirection dir, std::vector<double> data, std::uint64_t tag, bool all) {
        std::span<const std::size_t> slices;
        if (!all) {
            slices = dir == HeatDirection::forward ? std::span<const std::size_t>(only_end)
                                                   : std::span<const std::size_t>(only_start);
        }
        return heat_mc_solve(dir, GridFunction{axis, std::move(data)}, grid, params, options.n_paths,
                             sde::derive_seed(options.seed, tag), slices, options.workers);
    };

    HalfBridgeResult out;
    HeatField forward =
        solve(HeatDirection::forward, ratio(p_initial, phi_start, axis, "phi at t_start"), 0, false);
    HeatField backward{grid, axis, {}, {}, {}};
    for (std::size_t it = 0; it < options.n_iters; ++it) {
        const bool final = it + 1 == options.n_iters;
        const std::vector<double> phi_end = ratio(p_final, forward.at(last), axis, "phi_hat at t_end");
        backward = solve(HeatDirection::backward, phi_end, 2 * it + 1, final);
        forward = solve(HeatDirection::forward, ratio(p_initial, backward.at(0), axis, "phi at t_start"), 2 * it + 2,
                        final);
        std::vector<double> p_end(n_x);
        for (std::size_t j = 0; j < n_x; ++j) {
            p_end[j] = phi_end[j] * forward.at(last)[j];
        }
        out.terminal_gap.push_back(fp::l1_distance(p_end, p_final, axis.spacing()));
    }

    HalfBridgeState& s = out.state;
    s.grid = grid;
    s.axis = axis;
    s.iterations = options.n_iters;
    s.phi = backward.values;
    s.phi_error = backward.std_error;
    s.phi_hat = forward.values;
    s.phi_hat_error = forward.std_error;

    const double scale = 2.0 / params.beta;
    std::vector<std::vector<double>> gradient(grid.n_nodes());
    std::vector<std::vector<double>> value(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        std::vector<double> log_phi(n_x);
        for (std::size_t j = 0; j < n_x; ++j) {
            if (!(s.phi[k][j] > 0.0)) {
                throw ZeroDivision("phi vanished at t = " + std::to_string(grid.node(k)) +
                                   ", q = " + std::to_string(axis[j]) + "; widen the spatial grid");
            }
            log_phi[j] = std::log(s.phi[k][j]);
        }
        gradient[k] = sde::grid_derivative(log_phi, axis.spacing());
        for (std::size_t j = 0; j < n_x; ++j) {
            gradient[k][j] *= -scale;
            log_phi[j] *= -scale;
        }
        value[k] = std::move(log_phi);
    }
    out.drift = std::make_shared<sde::TabulatedDrift>(grid, axis, std::move(gradient), std::move(value));
    return out;
}

} // namespace stochctl::bridge
