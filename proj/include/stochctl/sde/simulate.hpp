#pragma once

#include "stochctl/sde/params.hpp"
#include "stochctl/sde/potential.hpp"
#include "stochctl/sde/random.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace stochctl::sde {

enum class DynamicsKind {
    overdamped_forward,       // dq = -mu dU dt + sqrt(2 mu / beta) dw
    overdamped_backward_free, // backward free diffusion, no drift
    underdamped_forward,      // Langevin-Kramers
    underdamped_backward,     // reversed phase-space dynamics without friction
};

enum class Direction { forward, backward };

Direction direction_of(DynamicsKind kind);
bool is_underdamped(DynamicsKind kind);
/// d for overdamped kinds, 2d (q then p) for underdamped ones.
std::size_t state_dim(DynamicsKind kind, std::size_t d);

/// One trajectory, stored in physical time order (node 0 = t_start) whatever
/// the direction of simulation. increments[k] is the Wiener increment (variance
/// h per component) of the step between nodes k and k+1.
struct Path {
    Direction direction = Direction::forward;
    std::size_t state_dim = 0;
    std::size_t noise_dim = 0;
    std::vector<double> states;
    std::vector<double> increments;

    std::span<const double> state(std::size_t k) const { return {states.data() + k * state_dim, state_dim}; }
    std::span<const double> increment(std::size_t k) const
    {
        return {increments.data() + k * noise_dim, noise_dim};
    }
};

struct PathEnsemble {
    TimeGrid grid;
    DynamicsKind kind;
    std::vector<Path> paths;
};

/// n_steps x dim standard normal draws, in the order the simulation consumes them.
std::vector<double> sample_increments(const TimeGrid& grid, std::size_t dim, RandomStream& stream);

/// Simulates from `start` (placed at t_start for forward kinds, t_end for
/// backward ones) using the given standard normal draws.
Path simulate(DynamicsKind kind, const PotentialModel& potential, std::span<const double> start,
              const TimeGrid& grid, const PhysicalParams& params, std::span<const double> normals);

Path simulate(DynamicsKind kind, const PotentialModel& potential, std::span<const double> start,
              const TimeGrid& grid, const PhysicalParams& params, RandomStream& stream);

/// n_paths trajectories from the same start; path i uses stream (seed, point_index, i).
PathEnsemble simulate_ensemble(DynamicsKind kind, const PotentialModel& potential, std::span<const double> start,
                               const TimeGrid& grid, const PhysicalParams& params, std::size_t n_paths,
                               std::uint64_t seed, std::uint64_t point_index = 0, std::size_t workers = 1);

/// Single Euler-Maruyama steps shared by the simulators and the estimators.
/// `grad` is scratch of size d. State spans are updated in place.
namespace step {

void overdamped_forward(const PotentialModel& u, double t, std::span<double> q, std::span<const double> eps,
                        const PhysicalParams& p, double h, std::span<double> grad);

void overdamped_backward_free(std::span<double> q, std::span<const double> eps, const PhysicalParams& p, double h);

/// x = (q, p); drift evaluated at time t and the current state.
void underdamped_forward(const PotentialModel& u, double t, std::span<double> x, std::span<const double> eps,
                         const PhysicalParams& p, double h, std::span<double> grad);

/// Variants taking the drift gradient dU(q) already evaluated by the caller.
void overdamped_forward_given(std::span<double> q, std::span<const double> grad, std::span<const double> eps,
                              const PhysicalParams& p, double h);
void underdamped_forward_given(std::span<double> x, std::span<const double> grad, std::span<const double> eps,
                               const PhysicalParams& p, double h);

/// One step backward from time t: q -= p h / m, p += dU_t(q) h - sqrt(2 m h / (tau beta)) eps.
void underdamped_backward(const PotentialModel& u, double t, std::span<double> x, std::span<const double> eps,
                          const PhysicalParams& p, double h, std::span<double> grad);

/// Throws NonFiniteState if any component is not finite.
void check_finite(std::span<const double> x, double t);

} // namespace step

} // namespace stochctl::sde
