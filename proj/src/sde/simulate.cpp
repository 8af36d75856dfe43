#include "stochctl/sde/simulate.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/sde/parallel.hpp"

#include <cmath>
#include <sstream>

namespace stochctl::sde {

Direction direction_of(DynamicsKind kind)
{
    return (kind == DynamicsKind::overdamped_forward || kind == DynamicsKind::underdamped_forward)
               ? Direction::forward
               : Direction::backward;
}

bool is_underdamped(DynamicsKind kind)
{
    return kind == DynamicsKind::underdamped_forward || kind == DynamicsKind::underdamped_backward;
}

std::size_t state_dim(DynamicsKind kind, std::size_t d) { return is_underdamped(kind) ? 2 * d : d; }

std::vector<double> sample_increments(const TimeGrid& grid, std::size_t dim, RandomStream& stream)
{
    if (dim < 1) {
        throw InvalidInput("increment dimension must be >= 1");
    }
    std::vector<double> out(grid.n_steps() * dim);
    stream.fill_normal(out);
    return out;
}

namespace step {

void check_finite(std::span<const double> x, double t)
{
    for (double v : x) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "state left the representable range at t=" << t << " (drift blow-up or step too large)";
            throw NonFiniteState(msg.str());
        }
    }
}

void overdamped_forward_given(std::span<double> q, std::span<const double> grad, std::span<const double> eps,
                              const PhysicalParams& p, double h)
{
    const double sigma = std::sqrt(2.0 * p.mu * h / p.beta);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] += -p.mu * grad[i] * h + sigma * eps[i];
    }
}

void overdamped_forward(const PotentialModel& u, double t, std::span<double> q, std::span<const double> eps,
                        const PhysicalParams& p, double h, std::span<double> grad)
{
    u.gradient(t, q, grad);
    overdamped_forward_given(q, grad, eps, p, h);
}

void overdamped_backward_free(std::span<double> q, std::span<const double> eps, const PhysicalParams& p, double h)
{
    const double sigma = std::sqrt(2.0 * p.mu * h / p.beta);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] -= sigma * eps[i];
    }
}

void underdamped_forward(const PotentialModel& u, double t, std::span<double> x, std::span<const double> eps,
                         const PhysicalParams& p, double h, std::span<double> grad)
{
    u.gradient(t, x.first(x.size() / 2), grad);
    underdamped_forward_given(x, grad, eps, p, h);
}

void underdamped_forward_given(std::span<double> x, std::span<const double> grad, std::span<const double> eps,
                               const PhysicalParams& p, double h)
{
    const std::size_t d = x.size() / 2;
    const double sigma = std::sqrt(2.0 * p.mass * h / (p.tau * p.beta));
    auto q = x.first(d);
    auto mom = x.subspan(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        const double pi = mom[i];
        q[i] += pi / p.mass * h;
        mom[i] += -(pi / p.tau + grad[i]) * h + sigma * eps[i];
    }
}

void underdamped_backward(const PotentialModel& u, double t, std::span<double> x, std::span<const double> eps,
                          const PhysicalParams& p, double h, std::span<double> grad)
{
    const std::size_t d = x.size() / 2;
    const double sigma = std::sqrt(2.0 * p.mass * h / (p.tau * p.beta));
    auto q = x.first(d);
    auto mom = x.subspan(d, d);
    u.gradient(t, q, grad);
    for (std::size_t i = 0; i < d; ++i) {
        q[i] -= mom[i] / p.mass * h;
        mom[i] += grad[i] * h - sigma * eps[i];
    }
}

} // namespace step

Path simulate(DynamicsKind kind, const PotentialModel& potential, std::span<const double> start,
              const TimeGrid& grid, const PhysicalParams& params, std::span<const double> normals)
{
    params.validate();
    const std::size_t d = params.dim;
    const std::size_t sd = state_dim(kind, d);
    if (start.size() != sd) {
        throw InvalidInput("start state has dimension " + std::to_string(start.size()) + ", expected " +
                           std::to_string(sd));
    }
    if (kind != DynamicsKind::overdamped_backward_free) {
        check_dim(potential, d);
    }
    const std::size_t n = grid.n_steps();
    if (normals.size() != n * d) {
        throw InvalidInput("increment count does not match the grid");
    }
    const double h = grid.step();
    const double sqrt_h = std::sqrt(h);

    Path path;
    path.direction = direction_of(kind);
    path.state_dim = sd;
    path.noise_dim = d;
    path.states.resize(grid.n_nodes() * sd);
    path.increments.resize(n * d);

    std::vector<double> x(start.begin(), start.end());
    std::vector<double> grad(d);
    auto store = [&](std::size_t node) { std::copy(x.begin(), x.end(), path.states.begin() + node * sd); };

    if (path.direction == Direction::forward) {
        store(0);
        for (std::size_t k = 0; k < n; ++k) {
            auto eps = normals.subspan(k * d, d);
            const double t = grid.node(k);
            if (kind == DynamicsKind::overdamped_forward) {
                step::overdamped_forward(potential, t, x, eps, params, h, grad);
            } else {
                step::underdamped_forward(potential, t, x, eps, params, h, grad);
            }
            step::check_finite(x, grid.node(k + 1));
            for (std::size_t i = 0; i < d; ++i) {
                path.increments[k * d + i] = sqrt_h * eps[i];
            }
            store(k + 1);
        }
    } else {
        store(n);
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t k = n - s; // stepping from node k to k-1
            auto eps = normals.subspan(s * d, d);
            if (kind == DynamicsKind::overdamped_backward_free) {
                step::overdamped_backward_free(x, eps, params, h);
            } else {
                step::underdamped_backward(potential, grid.node(k), x, eps, params, h, grad);
            }
            step::check_finite(x, grid.node(k - 1));
            for (std::size_t i = 0; i < d; ++i) {
                path.increments[(k - 1) * d + i] = sqrt_h * eps[i];
            }
            store(k - 1);
        }
    }
    return path;
}

Path simulate(DynamicsKind kind, const PotentialModel& potential, std::span<const double> start,
              const TimeGrid& grid, const PhysicalParams& params, RandomStream& stream)
{
    const auto normals = sample_increments(grid, params.dim, stream);
    return simulate(kind, potential, start, grid, params, normals);
}

PathEnsemble simulate_ensemble(DynamicsKind kind, const PotentialModel& potential, std::span<const double> start,
                               const TimeGrid& grid, const PhysicalParams& params, std::size_t n_paths,
                               std::uint64_t seed, std::uint64_t point_index, std::size_t workers)
{
    PathEnsemble ens{grid, kind, std::vector<Path>(n_paths)};
    parallel_for(n_paths, workers, [&](std::size_t i) {
        RandomStream stream(seed, point_index, i);
        ens.paths[i] = simulate(kind, potential, start, grid, params, stream);
    });
    return ens;
}

} // namespace stochctl::sde
