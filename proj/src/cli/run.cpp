#include "stochctl/cli/run.hpp"

#include "stochctl/acceptance/criteria.hpp"
#include "stochctl/bel/estimators.hpp"
#include "stochctl/bridge/checkpoint.hpp"
#include "stochctl/bridge/half_bridge.hpp"
#include "stochctl/bridge/trainer.hpp"
#include "stochctl/errors.hpp"
#include "stochctl/fp/girsanov.hpp"
#include "stochctl/fp/smoothing.hpp"
#include "stochctl/sde/random.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace stochctl::cli {

namespace {

using nlohmann::json;

void put(std::string& out, double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

void put_row(std::string& out, std::initializer_list<std::span<const double>> parts)
{
    bool first = true;
    for (auto part : parts) {
        for (double v : part) {
            if (!first) {
                out += ',';
            }
            first = false;
            put(out, v);
        }
    }
    out += '\n';
}

std::string header(const std::vector<std::string>& names)
{
    std::string h;
    for (std::size_t i = 0; i < names.size(); ++i) {
        h += (i ? "," : "") + names[i];
    }
    return h + '\n';
}

std::vector<std::string> state_names(const char* base, std::size_t d)
{
    if (d == 1) {
        return {base};
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < d; ++i) {
        out.push_back(std::string(base) + std::to_string(i + 1));
    }
    return out;
}

template <class... V> std::vector<std::string> concat(V&&... parts)
{
    std::vector<std::string> out;
    (out.insert(out.end(), parts.begin(), parts.end()), ...);
    return out;
}

// ---------- configuration readers ----------

sde::PhysicalParams read_params(const Config& c)
{
    sde::PhysicalParams p;
    p.beta = c.number("dynamics.beta");
    p.mu = c.number("dynamics.mu", 1.0);
    p.tau = c.number("dynamics.tau", 1.0);
    p.mass = c.number("dynamics.mass", 1.0);
    p.dim = c.count("dynamics.dim", 1);
    try {
        p.validate();
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string("config key 'dynamics': ") + e.what());
    }
    return p;
}

sde::TimeGrid read_grid(const Config& c)
{
    return sde::make_grid(c.number("grid.t_start", 0.0), c.number("grid.t_end", 1.0), c.number("grid.step", 0.01));
}

std::vector<double> broadcast(const Config& c, const std::string& key, std::size_t n, double fallback)
{
    auto v = c.numbers(key, {fallback});
    if (v.size() == 1 && n > 1) {
        v.assign(n, v[0]);
    }
    if (v.size() != n) {
        throw InvalidInput("config key '" + key + "': expected 1 or " + std::to_string(n) + " values");
    }
    return v;
}

std::shared_ptr<sde::PotentialModel> named_potential(const std::string& kind, std::size_t d, const Config& c,
                                                     const std::string& key)
{
    if (kind == "zero") {
        return std::make_shared<sde::ZeroPotential>(d);
    }
    if (kind == "quartic_shift") {
        return std::make_shared<sde::QuarticShift>(d);
    }
    if (kind == "double_well") {
        return std::make_shared<sde::DoubleWell>(d);
    }
    if (kind == "monomial_grad") {
        return std::make_shared<sde::MonomialGrad>(d);
    }
    if (kind == "quadratic") {
        auto s = c.numbers("potential.stiffness", {1.0});
        if (s.size() == 1) {
            std::vector<double> m(d * d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                m[i * d + i] = s[0];
            }
            s = m;
        }
        if (s.size() != d * d) {
            throw InvalidInput("config key 'potential.stiffness': expected 1 or d*d values");
        }
        return std::make_shared<sde::QuadraticMatrix>(d, s);
    }
    throw InvalidInput("config key '" + key + "': unknown potential '" + kind + "'");
}

std::shared_ptr<sde::TabulatedDrift> read_drift_table(const std::string& path)
{
    std::ifstream f(path);
    if (!f) {
        throw InvalidInput("config key 'potential.file': cannot read " + path);
    }
    std::string line;
    std::getline(f, line);
    if (line.rfind("t,q,drift", 0) != 0) {
        throw InvalidInput("config key 'potential.file': expected a t,q,drift[,potential] header");
    }
    std::vector<double> ts, qs;
    std::vector<std::vector<double>> grad, value;
    while (std::getline(f, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream s(line);
        std::string cell;
        while (std::getline(s, cell, ',')) {
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc{}) {
                throw InvalidInput("config key 'potential.file': bad number '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() < 3) {
            throw InvalidInput("config key 'potential.file': short row");
        }
        if (ts.empty() || row[0] != ts.back()) {
            ts.push_back(row[0]);
            grad.emplace_back();
            value.emplace_back();
        }
        if (ts.size() == 1) {
            qs.push_back(row[1]);
        }
        grad.back().push_back(row[2]);
        if (row.size() > 3) {
            value.back().push_back(row[3]);
        }
    }
    if (ts.size() < 2 || qs.size() < 2) {
        throw InvalidInput("config key 'potential.file': table needs two times and two points");
    }
    for (const auto& g : grad) {
        if (g.size() != qs.size()) {
            throw InvalidInput("config key 'potential.file': ragged table");
        }
    }
    const bool has_value = value.front().size() == qs.size();
    sde::TimeGrid grid(ts.front(), ts.back(), ts.size() - 1);
    sde::UniformAxis axis(qs.front(), qs.back(), qs.size());
    return std::make_shared<sde::TabulatedDrift>(grid, axis, std::move(grad),
                                                 has_value ? std::move(value) : std::vector<std::vector<double>>{});
}

std::shared_ptr<sde::PotentialModel> read_potential(const Config& c, std::size_t d)
{
    const std::string kind = c.text("potential.kind", "zero");
    if (kind == "tabulated") {
        if (d != 1) {
            throw InvalidInput("config key 'potential.kind': tabulated drifts are one dimensional");
        }
        return read_drift_table(c.text("potential.file"));
    }
    if (kind == "network") {
        auto state = bridge::load_checkpoint(c.text("potential.checkpoint"));
        if (state.network.dim() != d) {
            throw InvalidInput("config key 'potential.checkpoint': network dimension differs from dynamics.dim");
        }
        return std::make_shared<bridge::NetworkDrift>(std::make_shared<bridge::DriftNetwork>(state.network));
    }
    return named_potential(kind, d, c, "potential.kind");
}

std::shared_ptr<fp::Density> read_position_density(const Config& c, const sde::PhysicalParams& p)
{
    const std::string kind = c.text("initial.kind", "gaussian");
    if (kind == "gaussian") {
        return std::make_shared<fp::GaussianDensity>(fp::GaussianDensity::isotropic(
            broadcast(c, "initial.mean", p.dim, 0.0), c.number("initial.variance", 1.0)));
    }
    if (kind == "gibbs") {
        if (p.dim != 1) {
            throw InvalidInput("config key 'initial.kind': Gibbs initial densities are one dimensional");
        }
        return std::make_shared<fp::GibbsDensity>(
            named_potential(c.text("initial.potential"), 1, c, "initial.potential"), p.beta,
            c.number("initial.lo", -8.0), c.number("initial.hi", 8.0), c.count("initial.nodes", 20001));
    }
    throw InvalidInput("config key 'initial.kind': unknown kind '" + kind + "'");
}

std::shared_ptr<fp::Density> read_phase_density(const Config& c, const sde::PhysicalParams& p)
{
    auto rho = read_position_density(c, p);
    const std::string kind = c.text("initial.momentum", "maxwell");
    std::shared_ptr<fp::Density> sigma;
    if (kind == "maxwell") {
        sigma = fp::maxwell_boltzmann(p.dim, p.mass, p.beta);
    } else if (kind == "gaussian") {
        sigma = std::make_shared<fp::GaussianDensity>(fp::GaussianDensity::isotropic(
            std::vector<double>(p.dim, 0.0), c.number("initial.momentum_variance")));
    } else {
        throw InvalidInput("config key 'initial.momentum': unknown kind '" + kind + "'");
    }
    return std::make_shared<fp::ProductDensity>(rho, sigma);
}

struct PointSet {
    std::vector<std::vector<double>> points;
    bool uniform = false; // one dimensional evaluation grid
    double spacing = 0.0;
};

PointSet read_list(const Config& c, std::size_t n)
{
    PointSet out;
    std::stringstream s(c.text("points.list"));
    std::string item;
    while (std::getline(s, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        Config one;
        one.set("points.list", item);
        auto v = one.numbers("points.list");
        if (v.size() != n) {
            throw InvalidInput("config key 'points.list': each point needs " + std::to_string(n) + " components");
        }
        out.points.push_back(std::move(v));
    }
    if (out.points.empty()) {
        throw InvalidInput("config key 'points.list': no points");
    }
    return out;
}

std::vector<double> read_interval(const Config& c, const std::string& lo, const std::string& hi,
                                  const std::string& count, double dlo, double dhi, std::size_t dn)
{
    const double a = c.number(lo, dlo);
    const double b = c.number(hi, dhi);
    const std::size_t n = c.count(count, dn);
    if (n == 0) {
        throw InvalidInput("config key '" + count + "': must be positive");
    }
    if (n == 1) {
        return {a};
    }
    if (!(b > a)) {
        throw InvalidInput("config key '" + hi + "': must exceed " + lo);
    }
    return sde::UniformAxis(a, b, n).points();
}

PointSet read_positions(const Config& c, std::size_t d)
{
    if (c.has("points.list")) {
        return read_list(c, d);
    }
    if (d != 1) {
        throw InvalidInput("config key 'points.list': required when dynamics.dim > 1");
    }
    PointSet out;
    for (double x : read_interval(c, "points.min", "points.max", "points.count", -3.0, 3.0, 41)) {
        out.points.push_back({x});
    }
    out.uniform = out.points.size() > 2;
    if (out.uniform) {
        out.spacing = out.points[1][0] - out.points[0][0];
    }
    return out;
}

PointSet read_phase_points(const Config& c, std::size_t d)
{
    if (c.has("points.list")) {
        return read_list(c, 2 * d);
    }
    if (d != 1) {
        throw InvalidInput("config key 'points.list': required when dynamics.dim > 1");
    }
    PointSet out;
    const auto qs = read_interval(c, "points.min", "points.max", "points.count", -3.0, 3.0, 41);
    const auto ps = read_interval(c, "points.p_min", "points.p_max", "points.p_count", 0.0, 0.0, 1);
    for (double q : qs) {
        for (double p : ps) {
            out.points.push_back({q, p});
        }
    }
    return out;
}

bel::TerminalData read_terminal(const Config& c, std::size_t n, double bridge_cost)
{
    const double k = c.number("terminal.constant", 0.0);
    const auto lin = broadcast(c, "terminal.linear", n, 0.0);
    const auto quad = broadcast(c, "terminal.quadratic", n, 0.0);
    bel::TerminalData td;
    td.phi = [k, lin, quad](std::span<const double> x) {
        double s = k;
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += lin[i] * x[i] + quad[i] * x[i] * x[i];
        }
        return s;
    };
    const std::string rc = c.text("terminal.running_cost", "none");
    if (rc == "bridge") {
        td.control_cost = bridge_cost;
    } else if (rc != "none") {
        throw InvalidInput("config key 'terminal.running_cost': expected none or bridge");
    }
    return td;
}

bridge::BoundaryPair read_boundaries(const Config& c, double beta)
{
    auto one = [&](const std::string& key, const std::string& fallback) -> std::pair<std::string, std::vector<std::string>> {
        std::vector<std::string> f;
        std::stringstream s(c.text(key, fallback));
        std::string item;
        while (std::getline(s, item, ':')) {
            f.push_back(item);
        }
        if (f.empty()) {
            throw InvalidInput("config key '" + key + "': empty");
        }
        return {key, f};
    };
    const auto a = one("bridge.initial", "gibbs:quartic_shift");
    const auto b = one("bridge.final", "gibbs:double_well");
    if (a.second[0] != b.second[0]) {
        throw InvalidInput("config key 'bridge.final': both boundaries must be gibbs or both gaussian");
    }
    const std::string kind = a.second[0];
    if (kind == "gibbs") {
        for (const auto& x : {a, b}) {
            if (x.second.size() != 2) {
                throw InvalidInput("config key '" + x.first + "': expected gibbs:<potential>");
            }
        }
        return bridge::BoundaryPair::gibbs(named_potential(a.second[1], 1, c, a.first),
                                           named_potential(b.second[1], 1, c, b.first), beta,
                                           c.number("bridge.z_lo", -8.0), c.number("bridge.z_hi", 8.0),
                                           c.count("bridge.z_nodes", 20001));
    }
    if (kind == "gaussian") {
        double v[4];
        int i = 0;
        for (const auto& x : {a, b}) {
            if (x.second.size() != 3) {
                throw InvalidInput("config key '" + x.first + "': expected gaussian:<mean>:<variance>");
            }
            Config tmp;
            tmp.set(x.first, x.second[1] + "," + x.second[2]);
            const auto mv = tmp.numbers(x.first);
            v[i++] = mv[0];
            v[i++] = mv[1];
        }
        return bridge::BoundaryPair::gaussian(v[0], v[1], v[2], v[3]);
    }
    throw InvalidInput("config key 'bridge.initial': unknown boundary kind '" + kind + "'");
}

std::size_t paths(const Config& c, std::size_t fallback) { return c.count("run.paths", fallback); }
std::uint64_t seed_of(const Config& c) { return c.seed("run.seed", 0); }
std::size_t workers(const Config& c) { return std::max<std::size_t>(1, c.count("run.workers", 1)); }

// ---------- subcommands ----------

RunResult fp_overdamped(const Config& c)
{
    const auto p = read_params(c);
    const auto grid = read_grid(c);
    const auto u = read_potential(c, p.dim);
    const auto rho = read_position_density(c, p);
    const auto pts = read_positions(c, p.dim);
    fp::DensityQuery q;
    q.eval_points = pts.points;
    q.eval_time = c.number("eval.time", grid.t_end());
    q.initial_density = rho.get();
    q.n_paths = paths(c, 1000);
    q.grid = grid;
    q.params = p;
    q.potential = u.get();
    q.seed = seed_of(c);
    q.workers = workers(c);
    const auto est = fp::density_overdamped(q);

    std::vector<double> values;
    for (const auto& e : est) {
        values.push_back(e.mean);
    }
    const std::size_t w = c.count("smoothing.half_width", 2);
    if (pts.uniform && w > 0) {
        values = fp::box_smooth(values, w);
    }
    RunResult r;
    r.csv = header(concat(state_names("q", p.dim), std::vector<std::string>{"estimate", "std_error", "mean_weight"}));
    double weight = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) {
        const double tail[] = {values[j], est[j].std_error, est[j].mean_weight};
        put_row(r.csv, {pts.points[j], tail});
        weight += est[j].mean_weight;
    }
    r.diagnostics["average_mean_weight"] = weight / static_cast<double>(est.size());
    if (pts.uniform) {
        r.diagnostics["mass"] = fp::normalize(values, pts.spacing).mass;
        r.diagnostics["smoothing_half_width"] = w;
    }
    return r;
}

RunResult fp_underdamped(const Config& c)
{
    const auto p = read_params(c);
    const auto grid = read_grid(c);
    const auto u = read_potential(c, p.dim);
    const auto rho = read_phase_density(c, p);
    const auto pts = read_phase_points(c, p.dim);
    fp::DensityQuery q;
    q.eval_points = pts.points;
    q.eval_time = c.number("eval.time", grid.t_end());
    q.initial_density = rho.get();
    q.n_paths = paths(c, 1000);
    q.grid = grid;
    q.params = p;
    q.potential = u.get();
    q.seed = seed_of(c);
    q.workers = workers(c);
    const auto est = fp::density_underdamped(q);
    RunResult r;
    r.csv = header(concat(state_names("q", p.dim), state_names("p", p.dim),
                          std::vector<std::string>{"estimate", "std_error", "mean_weight"}));
    for (std::size_t j = 0; j < est.size(); ++j) {
        const double tail[] = {est[j].mean, est[j].std_error, est[j].mean_weight};
        put_row(r.csv, {pts.points[j], tail});
    }
    r.diagnostics["points"] = est.size();
    return r;
}

bel::HjbQuery hjb_query(const Config& c, const sde::PhysicalParams& p, bool underdamped,
                        std::shared_ptr<sde::PotentialModel>& u, PointSet& pts)
{
    u = read_potential(c, p.dim);
    pts = underdamped ? read_phase_points(c, p.dim) : read_positions(c, p.dim);
    bel::HjbQuery q;
    q.grid = read_grid(c);
    q.points = pts.points;
    q.time = c.number("eval.time", q.grid.t_start());
    q.kind = underdamped ? sde::DynamicsKind::underdamped_forward : sde::DynamicsKind::overdamped_forward;
    q.potential = u.get();
    q.terminal = read_terminal(c, underdamped ? 2 * p.dim : p.dim,
                               underdamped ? bel::bridge_cost_underdamped(p) : bel::bridge_cost_overdamped(p));
    q.params = p;
    q.n_paths = paths(c, 1000);
    q.seed = seed_of(c);
    q.workers = workers(c);
    return q;
}

RunResult hjb_value(const Config& c)
{
    const auto p = read_params(c);
    const std::string model = c.text("dynamics.model", "overdamped");
    if (model != "overdamped" && model != "underdamped") {
        throw InvalidInput("config key 'dynamics.model': expected overdamped or underdamped");
    }
    const bool ud = model == "underdamped";
    std::shared_ptr<sde::PotentialModel> u;
    PointSet pts;
    const auto q = hjb_query(c, p, ud, u, pts);
    const auto est = bel::dynkin_value(q);
    RunResult r;
    auto names = state_names("q", p.dim);
    if (ud) {
        names = concat(names, state_names("p", p.dim));
    }
    r.csv = header(concat(names, std::vector<std::string>{"estimate", "std_error"}));
    for (std::size_t j = 0; j < est.size(); ++j) {
        const double tail[] = {est[j].mean, est[j].std_error};
        put_row(r.csv, {pts.points[j], tail});
    }
    r.diagnostics["points"] = est.size();
    return r;
}

RunResult hjb_grad_overdamped(const Config& c)
{
    const auto p = read_params(c);
    std::shared_ptr<sde::PotentialModel> u;
    PointSet pts;
    const auto q = hjb_query(c, p, false, u, pts);
    const auto est = bel::grad_value_overdamped(q);
    RunResult r;
    std::vector<std::string> names = state_names("q", p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) {
        const std::string s = p.dim == 1 ? "" : "_" + std::to_string(i + 1);
        names.push_back("estimate" + s);
        names.push_back("std_error" + s);
    }
    r.csv = header(names);
    for (std::size_t j = 0; j < est.size(); ++j) {
        std::vector<double> tail;
        for (const auto& e : est[j]) {
            tail.push_back(e.mean);
            tail.push_back(e.std_error);
        }
        put_row(r.csv, {pts.points[j], tail});
    }
    r.diagnostics["points"] = est.size();
    return r;
}

RunResult hjb_grad_underdamped(const Config& c)
{
    const auto p = read_params(c);
    std::shared_ptr<sde::PotentialModel> u;
    PointSet pts;
    const auto q = hjb_query(c, p, true, u, pts);
    const std::string dir = c.text("gradient.direction", "momentum");
    if (dir != "momentum" && dir != "position") {
        throw InvalidInput("config key 'gradient.direction': expected momentum or position");
    }
    const auto v = broadcast(c, "gradient.vector", p.dim, 1.0);
    const auto est = bel::grad_value_underdamped(
        q, v, dir == "momentum" ? bel::GradientDirection::momentum : bel::GradientDirection::position);
    RunResult r;
    r.csv = header(concat(state_names("q", p.dim), state_names("p", p.dim),
                          std::vector<std::string>{"estimate", "std_error"}));
    for (std::size_t j = 0; j < est.size(); ++j) {
        const double tail[] = {est[j].mean, est[j].std_error};
        put_row(r.csv, {pts.points[j], tail});
    }
    r.diagnostics["points"] = est.size();
    return r;
}

RunResult bridge_iterate(const Config& c)
{
    const auto p = read_params(c);
    if (p.dim != 1) {
        throw InvalidInput("config key 'dynamics.dim': bridge solvers are one dimensional");
    }
    const auto grid = read_grid(c);
    const auto boundary = read_boundaries(c, p.beta);
    const sde::UniformAxis axis(c.number("bridge.axis_min", -6.0), c.number("bridge.axis_max", 6.0),
                                c.count("bridge.axis_count", 2401));
    bridge::HalfBridgeOptions o;
    o.n_iters = c.count("bridge.iters", 10);
    o.n_paths = paths(c, 5000);
    o.seed = seed_of(c);
    o.workers = workers(c);
    const auto res = bridge::half_bridge_iterate(boundary, grid, axis, p, o);
    const std::size_t stride = std::max<std::size_t>(1, c.count("bridge.stride", 10));

    RunResult r;
    r.csv = header({"t", "q", "phi", "phi_hat", "density"});
    std::string drift = header({"t", "q", "drift", "potential"});
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        const double t = grid.node(k);
        const auto& g = res.drift->gradient_slice(k);
        const auto& v = res.drift->value_slice(k);
        for (std::size_t j = 0; j < axis.size(); ++j) {
            const double row[] = {t, axis[j], g[j], v[j]};
            put_row(drift, {row});
            if (j % stride == 0 || j + 1 == axis.size()) {
                const double phi = res.state.phi[k][j];
                const double hat = res.state.phi_hat[k][j];
                const double out[] = {t, axis[j], phi, hat, phi * hat};
                put_row(r.csv, {out});
            }
        }
    }
    r.extra_files.emplace_back(".drift.csv", std::move(drift));
    r.diagnostics["terminal_gap"] = res.terminal_gap;
    return r;
}

RunResult bridge_train(const Config& c)
{
    const auto p = read_params(c);
    if (p.dim != 1) {
        throw InvalidInput("config key 'dynamics.dim': bridge solvers are one dimensional");
    }
    const auto grid = read_grid(c);
    const auto boundary = read_boundaries(c, p.beta);
    bridge::TrainOptions o;
    o.schedule = bridge::parse_schedule(c.text("train.schedule", "10:400:adam:0.5:1e-2;10:400:adam:0.2:2e-3"));
    o.n_paths_fp = c.count("train.paths_fp", o.n_paths_fp);
    o.n_paths_bel = c.count("train.paths_bel", o.n_paths_bel);
    o.batch_size = c.count("train.batch", o.batch_size);
    o.minibatch = c.count("train.minibatch", o.minibatch);
    o.sample_lo = c.number("train.sample_min", o.sample_lo);
    o.sample_hi = c.number("train.sample_max", o.sample_hi);
    o.kl_paths = c.count("train.kl_paths", o.kl_paths);
    o.seed = seed_of(c);
    o.workers = workers(c);

    auto state = bridge::initial_train_state(o);
    if (c.has("train.resume")) {
        std::uint64_t saved = 0;
        state = bridge::load_checkpoint(c.text("train.resume"), &saved);
        if (saved != o.seed) {
            throw InvalidInput("config key 'train.resume': checkpoint seed " + std::to_string(saved) +
                               " differs from run.seed " + std::to_string(o.seed));
        }
    }
    const std::string ckpt = c.text("train.checkpoint", "");
    state = bridge::train(boundary, grid, p, o, std::move(state), [&](const bridge::TrainState& s) {
        if (!ckpt.empty()) {
            bridge::save_checkpoint(ckpt, s, o.seed);
        }
        return true;
    });

    const auto pts = read_positions(c, 1);
    const bridge::NetworkDrift drift(std::make_shared<bridge::DriftNetwork>(state.network));
    fp::DensityQuery q;
    q.eval_points = pts.points;
    q.eval_time = grid.t_end();
    q.initial_density = boundary.initial.get();
    q.n_paths = c.count("train.eval_paths", 2000);
    q.grid = grid;
    q.params = p;
    q.potential = &drift;
    q.seed = sde::derive_seed(o.seed, 0x6576616c);
    q.workers = o.workers;
    const auto est = fp::density_overdamped(q);

    RunResult r;
    r.csv = header({"q", "estimate", "std_error", "mean_weight", "target"});
    std::vector<double> a, b;
    for (std::size_t j = 0; j < est.size(); ++j) {
        const double target = boundary.p_final(pts.points[j][0]);
        const double tail[] = {est[j].mean, est[j].std_error, est[j].mean_weight, target};
        put_row(r.csv, {pts.points[j], tail});
        a.push_back(est[j].mean);
        b.push_back(target);
    }
    std::string hist = header({"iteration", "phase", "l1_gap", "stationarity_residual", "mean_loss", "kl_cost"});
    json h = json::array();
    for (const auto& d : state.history) {
        const double row[] = {static_cast<double>(d.iteration), static_cast<double>(d.phase), d.l1_gap,
                              d.stationarity_residual, d.mean_loss, d.kl_cost};
        put_row(hist, {row});
        h.push_back({{"iteration", d.iteration},
                     {"phase", d.phase},
                     {"l1_gap", d.l1_gap},
                     {"stationarity_residual", d.stationarity_residual},
                     {"mean_loss", d.mean_loss},
                     {"kl_cost", d.kl_cost}});
    }
    r.extra_files.emplace_back(".history.csv", std::move(hist));
    r.extra_files.emplace_back(".checkpoint.json", bridge::checkpoint_to_string(state, o.seed));
    if (pts.uniform) {
        r.diagnostics["final_l1"] = fp::l1_distance(a, b, pts.spacing);
    }
    r.diagnostics["history"] = h;
    r.diagnostics["schedule"] = bridge::format_schedule(o.schedule);
    return r;
}

RunResult oracle_check(const Config& c, std::ostream* log)
{
    acceptance::AcceptanceOptions o;
    o.workers = workers(c);
    if (c.has("run.seed")) {
        o.seed = seed_of(c);
    }
    std::vector<std::string> ids = acceptance::criterion_ids();
    if (c.has("oracle.only")) {
        const std::string only = c.text("oracle.only");
        if (std::find(ids.begin(), ids.end(), only) == ids.end()) {
            throw InvalidInput("config key 'oracle.only': unknown criterion '" + only + "'");
        }
        ids = {only};
    }
    RunResult r;
    r.csv = "id,verdict,measured,expected\n";
    json verdicts = json::object();
    for (const auto& id : ids) {
        const auto res = acceptance::run_criterion(id, o);
        r.console.push_back(acceptance::format_result(res));
        if (log) {
            *log << r.console.back() << std::endl;
        }
        r.csv += res.id + ',' + (res.pass ? "PASS" : "FAIL") + ",\"" + res.measured + "\",\"" + res.expected + "\"\n";
        verdicts[id] = res.pass ? "PASS" : "FAIL";
        if (!res.pass) {
            r.exit_code = 1;
        }
    }
    r.diagnostics["verdicts"] = verdicts;
    return r;
}

using Runner = RunResult (*)(const Config&, std::ostream*);

template <RunResult (*F)(const Config&)> RunResult quiet(const Config& c, std::ostream*) { return F(c); }

const std::map<std::string, Runner>& runners()
{
    static const std::map<std::string, Runner> m = {
        {"fp-overdamped", quiet<fp_overdamped>},
        {"fp-underdamped", quiet<fp_underdamped>},
        {"hjb-value", quiet<hjb_value>},
        {"hjb-grad-overdamped", quiet<hjb_grad_overdamped>},
        {"hjb-grad-underdamped", quiet<hjb_grad_underdamped>},
        {"bridge-iterate", quiet<bridge_iterate>},
        {"bridge-train", quiet<bridge_train>},
        {"oracle-check", oracle_check},
    };
    return m;
}

std::filesystem::path with_suffix(const std::filesystem::path& out, const std::string& suffix)
{
    auto stem = out;
    stem.replace_extension();
    return stem.string() + suffix;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw InvalidInput("config key 'out': cannot write " + path.string());
    }
}

} // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : runners()) {
            v.push_back(k);
        }
        return v;
    }();
    return names;
}

RunResult execute(const std::string& subcommand, const Config& config, std::ostream* log)
{
    const auto it = runners().find(subcommand);
    if (it == runners().end()) {
        throw InvalidInput("unknown subcommand '" + subcommand + "'");
    }
    return it->second(config, log);
}

int main_entry(int argc, char** argv)
{
    CLI::App app{"Monte Carlo solvers for Fokker-Planck, HJB and Schroedinger bridge problems"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_path;
    std::map<std::string, std::string> overrides;
    for (const auto& name : subcommands()) {
        auto* s = app.add_subcommand(name);
        s->add_option("--config", config_path, "key=value config file or JSON run summary");
        s->add_option("--out", out_path, "CSV output path");
        const std::pair<const char*, const char*> aliases[] = {
            {"--seed", "run.seed"}, {"--paths", "run.paths"}, {"--workers", "run.workers"}, {"--only", "oracle.only"}};
        for (const auto& [flag, key] : aliases) {
            const std::string k = key;
            s->add_option_function<std::string>(flag, [&overrides, k](const std::string& v) { overrides[k] = v; },
                                                 k);
        }
        for (const auto& spec : known_keys()) {
            const std::string k = spec.key;
            s->add_option_function<std::string>("--" + k, [&overrides, k](const std::string& v) { overrides[k] = v; },
                                                 spec.help);
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        Config config = config_path.empty() ? Config{} : Config::from_file(config_path);
        for (const auto& [k, v] : overrides) {
            config.set(k, v);
        }
        RunResult r = execute(name, config, &std::cout);
        const std::filesystem::path out = out_path.empty() ? std::filesystem::path(name + ".csv") : std::filesystem::path(out_path);
        write_file(out, r.csv);
        for (const auto& [suffix, text] : r.extra_files) {
            write_file(with_suffix(out, suffix), text);
        }
        json summary;
        summary["subcommand"] = name;
        summary["config"] = config.values();
        summary["seed"] = config.seed("run.seed", 0);
        summary["runtime_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        summary["output"] = out.string();
        summary["diagnostics"] = r.diagnostics;
        auto summary_path = out;
        summary_path.replace_extension(".json");
        write_file(summary_path, summary.dump(2) + "\n");
        return r.exit_code;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}

} // namespace stochctl::cli
