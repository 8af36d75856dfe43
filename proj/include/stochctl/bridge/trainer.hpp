#pragma once

#include "stochctl/bridge/boundary.hpp"
#include "stochctl/bridge/lagrange.hpp"
#include "stochctl/bridge/network.hpp"
#include "stochctl/sde/params.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stochctl::bridge {

struct TrainPhase {
    std::size_t n_iters = 1;
    std::size_t n_param_updates = 100;
    OptimizerKind optimizer = OptimizerKind::adam;
    double gamma1 = 0.1; // lambda ascent rate
    double gamma2 = 1e-3; // network learning rate
};

/// "iters:updates:sgd|adam:gamma1:gamma2" phases separated by ';'.
std::vector<TrainPhase> parse_schedule(std::string_view text);
std::string format_schedule(const std::vector<TrainPhase>& schedule);

struct TrainOptions {
    std::vector<TrainPhase> schedule;
    std::size_t n_paths_fp = 100;
    std::size_t n_paths_bel = 10;
    std::size_t batch_size = 512;
    /// Rows per parameter update, drawn with replacement from the iteration's data.
    std::size_t minibatch = 256;
    double sample_lo = -3.0;
    double sample_hi = 3.0;
    std::size_t kl_paths = 256;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct IterationDiagnostics {
    std::size_t iteration = 0;
    std::size_t phase = 0;
    double l1_gap = 0.0;
    double stationarity_residual = 0.0;
    double mean_loss = 0.0;
    double kl_cost = 0.0;
};

/// Everything needed to continue a run exactly where it stopped.
struct TrainState {
    TrainState(DriftNetwork net, LagrangeMultiplier l, Optimizer opt)
        : network(std::move(net)), lambda(std::move(l)), optimizer(std::move(opt))
    {
    }

    DriftNetwork network;
    LagrangeMultiplier lambda;
    Optimizer optimizer;
    std::size_t phase = 0;
    std::size_t phase_iteration = 0;
    std::size_t iteration = 0;
    double initial_gap = std::numeric_limits<double>::quiet_NaN();
    std::vector<IterationDiagnostics> history;

    bool finished(const std::vector<TrainPhase>& schedule) const { return phase >= schedule.size(); }
};

/// Glorot network from derive_seed(seed, ...), zero lambda on the sampling interval.
TrainState initial_train_state(const TrainOptions& options, std::size_t dim = 1);

/// Runs the remaining schedule. after_iteration sees the state after each
/// iteration and may return false to stop early. Throws DivergedTraining when
/// the L1 gap exceeds ten times its first value.
TrainState train(const BoundaryPair& boundary, const sde::TimeGrid& grid, const sde::PhysicalParams& params,
                 const TrainOptions& options, TrainState state,
                 const std::function<bool(const TrainState&)>& after_iteration = {});

/// Regresses the network onto a given drift on grid nodes x uniform points in
/// [lo, hi] with Adam.
void distill(DriftNetwork& net, const sde::PotentialModel& drift, const sde::TimeGrid& grid, double lo, double hi,
             std::size_t n_points, std::size_t n_steps, double rate, std::uint64_t seed);

} // namespace stochctl::bridge
