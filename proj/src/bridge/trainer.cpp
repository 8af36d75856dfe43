#include "stochctl/bridge/trainer.hpp"

#include "stochctl/bel/estimators.hpp"
#include "stochctl/bridge/stationarity.hpp"
#include "stochctl/errors.hpp"
#include "stochctl/fp/girsanov.hpp"
#include "stochctl/sde/parallel.hpp"
#include "stochctl/sde/random.hpp"
#include "stochctl/sde/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>

namespace stochctl::bridge {

namespace {

enum SeedRole : std::uint64_t { role_points, role_density, role_gradient, role_minibatch, role_kl };

double parse_number(std::string_view field, std::string_view what)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw InvalidInput("train.schedule: bad " + std::string(what) + " '" + std::string(field) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view field, std::string_view what)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw InvalidInput("train.schedule: bad " + std::string(what) + " '" + std::string(field) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

/// Inverse CDF sampling from a tabulated one dimensional density.
class TableSampler {
public:
    TableSampler(const fp::Density& density, double lo, double hi, std::size_t n) : x_(n), cdf_(n, 0.0)
    {
        const double dx = (hi - lo) / static_cast<double>(n - 1);
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            x_[i] = lo + dx * static_cast<double>(i);
            p[i] = density(std::span<const double>(&x_[i], 1));
        }
        for (std::size_t i = 1; i < n; ++i) {
            cdf_[i] = cdf_[i - 1] + 0.5 * dx * (p[i] + p[i - 1]);
        }
        if (!(cdf_.back() > 0.0)) {
            throw ZeroMass("initial density has no mass on the sampling table");
        }
        for (double& c : cdf_) {
            c /= cdf_.back();
        }
    }

    double operator()(double u) const
    {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin()) {
            return x_.front();
        }
        if (it == cdf_.end()) {
            return x_.back();
        }
        const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        const double w = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
        return x_[i - 1] + w * (x_[i] - x_[i - 1]);
    }

private:
    std::vector<double> x_;
    std::vector<double> cdf_;
};

double kl_cost(const sde::PotentialModel& drift, const TableSampler& sample, const sde::TimeGrid& grid,
               const sde::PhysicalParams& params, std::size_t n_paths, std::uint64_t seed, std::size_t workers)
{
    const double c = bel::bridge_cost_overdamped(params);
    const double h = grid.step();
    auto acc = sde::reduce_paths<sde::RunningMoments>(
        1, n_paths, workers, [&](std::size_t, std::size_t first, std::size_t last, sde::RunningMoments& m) {
            double q[1];
            double g[1];
            double eps[1];
            for (std::size_t path = first; path < last; ++path) {
                sde::RandomStream rs(seed, 0, path);
                q[0] = sample(rs.uniform());
                double cost = 0.0;
                for (std::size_t k = 0; k < grid.n_steps(); ++k) {
                    drift.gradient(grid.node(k), q, g);
                    cost += h * c * g[0] * g[0];
                    eps[0] = rs.normal();
                    sde::step::overdamped_forward_given(q, g, eps, params, h);
                    sde::step::check_finite(q, grid.node(k + 1));
                }
                m.add(cost);
            }
        });
    return acc[0].mean;
}

} // namespace

std::vector<TrainPhase> parse_schedule(std::string_view text)
{
    std::vector<TrainPhase> out;
    for (std::string_view part : split(text, ';')) {
        if (part.empty()) {
            continue;
        }
        const auto f = split(part, ':');
        if (f.size() != 5) {
            throw InvalidInput("train.schedule: phase '" + std::string(part) +
                               "' must read iters:updates:sgd|adam:gamma1:gamma2");
        }
        TrainPhase p;
        p.n_iters = parse_count(f[0], "iteration count");
        p.n_param_updates = parse_count(f[1], "update count");
        if (f[2] == "sgd") {
            p.optimizer = OptimizerKind::sgd;
        } else if (f[2] == "adam") {
            p.optimizer = OptimizerKind::adam;
        } else {
            throw InvalidInput("train.schedule: unknown optimizer '" + std::string(f[2]) + "'");
        }
        p.gamma1 = parse_number(f[3], "gamma1");
        p.gamma2 = parse_number(f[4], "gamma2");
        out.push_back(p);
    }
    if (out.empty()) {
        throw InvalidInput("train.schedule: no phases");
    }
    return out;
}

std::string format_schedule(const std::vector<TrainPhase>& schedule)
{
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& p = schedule[i];
        s << (i ? ";" : "") << p.n_iters << ':' << p.n_param_updates << ':'
          << (p.optimizer == OptimizerKind::sgd ? "sgd" : "adam") << ':' << p.gamma1 << ':' << p.gamma2;
    }
    return s.str();
}

TrainState initial_train_state(const TrainOptions& options, std::size_t dim)
{
    DriftNetwork net = DriftNetwork::glorot(dim, sde::derive_seed(options.seed, 0x6e6574));
    Optimizer opt(options.schedule.empty() ? OptimizerKind::adam : options.schedule.front().optimizer,
                  net.n_params());
    return TrainState(std::move(net), LagrangeMultiplier(options.sample_lo, options.sample_hi, 6), std::move(opt));
}

TrainState train(const BoundaryPair& boundary, const sde::TimeGrid& grid, const sde::PhysicalParams& params,
                 const TrainOptions& options, TrainState state,
                 const std::function<bool(const TrainState&)>& after_iteration)
{
    if (options.schedule.empty()) {
        throw InvalidInput("train.schedule: no phases");
    }
    params.validate();
    if (params.dim != 1 || state.network.dim() != 1) {
        throw Unsupported("the trainer is one dimensional");
    }
    if (grid.n_steps() < 2) {
        throw HorizonTooShort("training needs at least two time steps");
    }
    if (options.batch_size == 0 || options.n_paths_fp == 0 || options.n_paths_bel == 0) {
        throw InvalidInput("train: batch size and path counts must be positive");
    }
    const std::size_t n_steps = grid.n_steps();
    const std::size_t k_points = options.batch_size;
    const double lo = options.sample_lo;
    const double hi = options.sample_hi;
    const double width = hi - lo;
    const TableSampler initial_sampler(*boundary.initial, lo - 3.0, hi + 3.0, 4001);
    const double control = bel::bridge_cost_overdamped(params);

    while (!state.finished(options.schedule)) {
        const TrainPhase& phase = options.schedule[state.phase];
        if (state.phase_iteration == 0) {
            state.optimizer = Optimizer(phase.optimizer, state.network.n_params());
        }
        const std::uint64_t seed = sde::derive_seed(options.seed, state.iteration);

        std::vector<double> x(k_points);
        std::vector<std::vector<double>> points(k_points);
        for (std::size_t k = 0; k < k_points; ++k) {
            sde::RandomStream rs(sde::derive_seed(seed, role_points), 0, k);
            x[k] = lo + width * rs.uniform();
            points[k] = {x[k]};
        }

        auto net = std::make_shared<const DriftNetwork>(state.network);
        const NetworkDrift drift(net);

        fp::DensityQuery fq;
        fq.eval_points = points;
        fq.eval_time = grid.t_end();
        fq.initial_density = boundary.initial.get();
        fq.n_paths = options.n_paths_fp;
        fq.grid = grid;
        fq.params = params;
        fq.potential = &drift;
        fq.seed = sde::derive_seed(seed, role_density);
        fq.workers = options.workers;
        const auto density = fp::density_overdamped(fq);
        std::vector<double> p(k_points);
        std::vector<double> target(k_points);
        double gap = 0.0;
        for (std::size_t k = 0; k < k_points; ++k) {
            p[k] = density[k].mean;
            target[k] = boundary.p_final(x[k]);
            gap += std::abs(p[k] - target[k]);
        }
        gap *= width / static_cast<double>(k_points);
        if (std::isnan(state.initial_gap)) {
            state.initial_gap = gap;
        } else if (gap > 10.0 * state.initial_gap) {
            throw DivergedTraining("L1 gap " + std::to_string(gap) + " exceeds ten times its initial value " +
                                   std::to_string(state.initial_gap) + " at iteration " +
                                   std::to_string(state.iteration));
        }
        state.lambda = lambda_update(state.lambda, x, p, target, phase.gamma1);
        const LagrangeMultiplier& lambda = state.lambda;

        TrainingBatch grad_v{1};
        bel::HjbQuery hq;
        hq.points = points;
        hq.kind = sde::DynamicsKind::overdamped_forward;
        hq.potential = &drift;
        hq.terminal.phi = [&lambda](std::span<const double> q) { return lambda(q[0]); };
        hq.terminal.control_cost = control;
        hq.grid = grid;
        hq.params = params;
        hq.n_paths = options.n_paths_bel;
        hq.workers = options.workers;
        hq.centered_payoff = true;
        for (std::size_t n = 0; n <= n_steps; ++n) {
            const double t = grid.node(n);
            if (n + 2 <= n_steps) {
                hq.time = t;
                hq.seed = sde::derive_seed(sde::derive_seed(seed, role_gradient), n);
                const auto g = bel::grad_value_overdamped(hq);
                for (std::size_t k = 0; k < k_points; ++k) {
                    const double v = g[k][0].mean;
                    grad_v.add(t, std::span<const double>(&x[k], 1), std::span<const double>(&v, 1));
                }
            } else {
                for (std::size_t k = 0; k < k_points; ++k) {
                    const double v = lambda.derivative(x[k]);
                    grad_v.add(t, std::span<const double>(&x[k], 1), std::span<const double>(&v, 1));
                }
            }
        }

        IterationDiagnostics diag;
        diag.iteration = state.iteration;
        diag.phase = state.phase;
        diag.l1_gap = gap;
        diag.stationarity_residual = stationarity_residual(drift, grad_v, params.beta);
        diag.kl_cost = kl_cost(drift, initial_sampler, grid, params, options.kl_paths,
                               sde::derive_seed(seed, role_kl), options.workers);

        TrainingBatch data = grad_v;
        for (double& v : data.target) {
            v *= 2.0 / params.beta;
        }
        const std::size_t rows = data.size();
        const std::size_t mb = std::min(options.minibatch == 0 ? rows : options.minibatch, rows);
        std::vector<double> grad(state.network.n_params());
        TrainingBatch batch{1};
        double loss_sum = 0.0;
        for (std::size_t u = 0; u < phase.n_param_updates; ++u) {
            batch.t.clear();
            batch.q.clear();
            batch.target.clear();
            sde::RandomStream rs(sde::derive_seed(seed, role_minibatch), u, 0);
            for (std::size_t i = 0; i < mb; ++i) {
                const std::size_t r =
                    std::min(rows - 1, static_cast<std::size_t>(rs.uniform() * static_cast<double>(rows)));
                batch.t.push_back(data.t[r]);
                batch.q.push_back(data.q[r]);
                batch.target.push_back(data.target[r]);
            }
            loss_sum += state.network.loss_and_gradient(batch, grad);
            state.optimizer.step(state.network.params(), grad, phase.gamma2);
        }
        diag.mean_loss = phase.n_param_updates > 0 ? loss_sum / static_cast<double>(phase.n_param_updates)
                                                   : state.network.loss(data);
        for (double w : state.network.params()) {
            if (!std::isfinite(w)) {
                throw DivergedTraining("network parameters became non-finite at iteration " +
                                       std::to_string(state.iteration));
            }
        }

        state.history.push_back(diag);
        ++state.iteration;
        if (++state.phase_iteration >= phase.n_iters) {
            ++state.phase;
            state.phase_iteration = 0;
        }
        if (after_iteration && !after_iteration(state)) {
            break;
        }
    }
    return state;
}

void distill(DriftNetwork& net, const sde::PotentialModel& drift, const sde::TimeGrid& grid, double lo, double hi,
             std::size_t n_points, std::size_t n_steps, double rate, std::uint64_t seed)
{
    sde::check_dim(drift, net.dim());
    if (net.dim() != 1) {
        throw Unsupported("distillation is one dimensional");
    }
    Optimizer opt(OptimizerKind::adam, net.n_params());
    std::vector<double> grad(net.n_params());
    TrainingBatch batch{1};
    for (std::size_t s = 0; s < n_steps; ++s) {
        batch.t.clear();
        batch.q.clear();
        batch.target.clear();
        for (std::size_t i = 0; i < n_points; ++i) {
            sde::RandomStream rs(seed, s, i);
            const auto k = std::min(grid.n_steps(),
                                    static_cast<std::size_t>(rs.uniform() * static_cast<double>(grid.n_nodes())));
            const double t = grid.node(k);
            const double q = lo + (hi - lo) * rs.uniform();
            double g = 0.0;
            drift.gradient(t, std::span<const double>(&q, 1), std::span<double>(&g, 1));
            batch.add(t, std::span<const double>(&q, 1), std::span<const double>(&g, 1));
        }
        net.loss_and_gradient(batch, grad);
        opt.step(net.params(), grad, rate);
    }
}

} // namespace stochctl::bridge
