#include "stochctl/bel/estimators.hpp"
#include "stochctl/bel/variational_field.hpp"
#include "stochctl/errors.hpp"
#include "stochctl/oracles/finite_diff.hpp"
#include "stochctl/sde/random.hpp"
#include "stochctl/sde/simulate.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace stochctl;
using namespace stochctl::bel;

namespace {
double sigmas(const WeightedEstimate& a, const WeightedEstimate& b)
{
    return std::abs(a.mean - b.mean) / std::hypot(a.std_error, b.std_error);
}

TerminalData linear_phi(std::vector<double> a)
{
    TerminalData td;
    td.phi = [a](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += a[i] * x[i];
        }
        return s;
    };
    return td;
}

// U = a q^4 / 4 + b q^2 / 2 + c q
class SmoothPotential final : public sde::PotentialModel {
public:
    SmoothPotential(double a, double b, double c) : a_(a), b_(b), c_(c) {}
    std::size_t dim() const override { return 1; }
    double value(double, std::span<const double> q) const override
    {
        const double x = q[0];
        return a_ * x * x * x * x / 4 + b_ * x * x / 2 + c_ * x;
    }
    void gradient(double, std::span<const double> q, std::span<double> out) const override
    {
        const double x = q[0];
        out[0] = a_ * x * x * x + b_ * x + c_;
    }
    void hessian(double, std::span<const double> q, std::span<double> out) const override
    {
        out[0] = 3 * a_ * q[0] * q[0] + b_;
    }

private:
    double a_, b_, c_;
};
} // namespace

TEST_CASE("variational field boundary values and h", "[bel][field]")
{
    auto f = variational_field({1.0, -2.0}, 0.3, 1.7, 0.8, 1.3);
    CHECK(f.ell(0.3) == std::vector<double>{1.0, -2.0});
    CHECK(f.ell(1.7) == std::vector<double>{0.0, -0.0});
    CHECK(f.g(0.3)[0] == 0.0);
    CHECK(f.g(1.7)[1] == 0.0);

    auto unit = variational_field({1.0}, 0.0, 1.0, 1.0, 1.0);
    std::vector<double> zero_h{0.0};
    CHECK(unit.h(0.0, zero_h)[0] == Catch::Approx(3.0));

    // l' = m g' ties the two channels together
    const double e = 1e-6;
    for (double u : {0.4, 0.9, 1.5}) {
        const double gd = (f.g(u + e)[0] - f.g(u - e)[0]) / (2 * e);
        CHECK(gd * 1.3 == Catch::Approx(f.ell(u)[0]).epsilon(1e-6));
        const double ld = (f.ell(u + e)[1] - f.ell(u - e)[1]) / (2 * e);
        CHECK(ld == Catch::Approx(f.ell_dot(u)[1]).epsilon(1e-6));
    }
    CHECK_THROWS_AS(variational_field({1.0}, 1.0, 1.0, 1.0, 1.0), DegenerateHorizon);
}

TEST_CASE("variational field telescoping identity", "[bel][field]")
{
    const double t = 0.2, tf = 1.4, tau = 0.7;
    auto f = variational_field({1.0}, t, tf, tau, 1.0);
    std::vector<double> zero_h{0.0};
    const int n = 2000; // Simpson
    const double dx = (tf - t) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = t + i * dx;
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        s += w * std::exp(-(tf - u) / tau) * f.h(u, zero_h)[0];
    }
    s *= dx / 3;
    CHECK(s == Catch::Approx(std::exp(-(tf - t) / tau) * f.ell(t)[0] - f.ell(tf)[0]).epsilon(1e-10));
}

TEST_CASE("Dynkin value of the free momentum", "[bel][dynkin]")
{
    sde::ZeroPotential zero;
    HjbQuery q;
    q.kind = sde::DynamicsKind::underdamped_forward;
    q.potential = &zero;
    q.terminal = linear_phi({0.0, 1.0});
    q.grid = sde::make_grid(0.0, 1.0, 0.01);
    q.points = {{0.0, 1.0}};
    q.n_paths = 20000;
    q.seed = 3;
    auto v = dynkin_value(q);
    CHECK(std::abs(v[0].mean - std::exp(-1.0)) <= 3 * v[0].std_error);
}

TEST_CASE("Dynkin value of a constant is exact", "[bel][dynkin]")
{
    sde::DoubleWell u;
    HjbQuery q;
    q.potential = &u;
    q.terminal.phi = [](std::span<const double>) { return 2.5; };
    q.grid = sde::make_grid(0.0, 0.2, 0.005);
    q.points = {{0.1}, {-1.0}};
    q.n_paths = 300;
    for (const auto& e : dynkin_value(q)) {
        CHECK(e.mean == 2.5);
        CHECK(e.std_error == 0.0);
    }
}

TEST_CASE("Dynkin value is stable under step refinement", "[bel][dynkin]")
{
    sde::DoubleWell u;
    sde::PhysicalParams p;
    HjbQuery q;
    q.potential = &u;
    q.params = p;
    q.terminal.phi = [](std::span<const double> x) { return 0.5 * x[0] * x[0]; };
    q.terminal.control_cost = bridge_cost_overdamped(p);
    q.grid = sde::make_grid(0.0, 0.2, 0.005);
    q.points = {{-1.2}, {0.4}, {1.6}};
    q.n_paths = 20000;
    q.seed = 8;
    auto coarse = dynkin_value(q);
    q.grid = sde::make_grid(0.0, 0.2, 0.005 / 4);
    q.seed = 9;
    auto fine = dynkin_value(q);
    for (int j = 0; j < 3; ++j) {
        CHECK(sigmas(coarse[j], fine[j]) <= 3.0);
    }
}

TEST_CASE("overdamped gradient of a linear terminal condition", "[bel][overdamped]")
{
    sde::ZeroPotential zero;
    HjbQuery q;
    q.potential = &zero;
    q.terminal = linear_phi({1.7});
    q.grid = sde::make_grid(0.0, 0.5, 0.01);
    q.points = {{0.3}};
    q.n_paths = 20000;
    auto g = grad_value_overdamped(q);
    CHECK(std::abs(g[0][0].mean - 1.7) <= 3 * g[0][0].std_error);
}

TEST_CASE("overdamped gradient through an OU flow", "[bel][overdamped]")
{
    sde::QuadraticMatrix u(2, {1.0, 0.3, 0.3, 0.5});
    sde::PhysicalParams p;
    p.dim = 2;
    p.mu = 0.8;
    p.beta = 2.0;
    HjbQuery q;
    q.potential = &u;
    q.params = p;
    q.terminal = linear_phi({1.0, -0.5});
    q.grid = sde::make_grid(0.0, 0.5, 0.005);
    q.points = {{0.2, -0.1}, {1.0, 0.5}};
    q.n_paths = 20000;
    q.workers = 2;
    auto g = grad_value_overdamped(q);
    // grad V = F^T a with F = exp(-mu S T), through the Euler flow
    Eigen::Matrix2d s;
    s << 1.0, 0.3, 0.3, 0.5;
    Eigen::Matrix2d step = Eigen::Matrix2d::Identity() - p.mu * 0.005 * s;
    Eigen::Matrix2d f = Eigen::Matrix2d::Identity();
    for (int i = 0; i < 100; ++i) {
        f = step * f;
    }
    Eigen::Vector2d expected = f.transpose() * Eigen::Vector2d(1.0, -0.5);
    for (const auto& at : g) {
        for (int c = 0; c < 2; ++c) {
            CHECK(std::abs(at[c].mean - expected[c]) <= 3 * at[c].std_error);
        }
    }
}

TEST_CASE("overdamped gradient with running cost matches pathwise differences", "[bel][overdamped]")
{
    // Common random numbers make the finite difference a pathwise derivative,
    // a much sharper check on the running-cost weights than independent runs.
    sde::DoubleWell u;
    sde::PhysicalParams p;
    HjbQuery q;
    q.potential = &u;
    q.params = p;
    q.terminal.phi = [](std::span<const double> x) { return std::sin(x[0]); };
    q.terminal.control_cost = bridge_cost_overdamped(p);
    q.grid = sde::make_grid(0.0, 0.2, 0.005);
    q.n_paths = 40000;
    q.seed = 21;
    for (double x : {-1.0, 0.3, 1.4}) {
        q.points = {{x}};
        q.seed = 21;
        auto g = grad_value_overdamped(q)[0][0];
        // one point per run, so both sides draw from stream (77, 0, path)
        q.seed = 77;
        q.points = {{x + 1e-3}};
        auto vp = dynkin_value(q)[0];
        q.points = {{x - 1e-3}};
        auto vm = dynkin_value(q)[0];
        const double fd = (vp.mean - vm.mean) / 2e-3;
        CHECK(std::abs(g.mean - fd) <= 3 * g.std_error + 0.01);
    }
}

TEST_CASE("BEL and Dynkin differences agree on random potentials", "[bel][property]")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ua(0.1, 0.5), ub(-1.0, 1.0), uc(-0.5, 0.5);
    sde::PhysicalParams p;
    for (int trial = 0; trial < 3; ++trial) {
        SmoothPotential u(ua(gen), ub(gen), uc(gen));
        HjbQuery q;
        q.potential = &u;
        q.params = p;
        q.terminal.phi = [](std::span<const double> x) { return std::cos(x[0]) + 0.2 * x[0]; };
        q.terminal.control_cost = bridge_cost_overdamped(p);
        q.grid = sde::make_grid(0.0, 0.2, 0.005);
        q.n_paths = 4000;
        q.workers = 2;
        int agree = 0;
        for (int k = 0; k < 11; ++k) {
            const double x = -2.0 + 0.4 * k;
            q.points = {{x}};
            q.seed = 1000 + trial;
            const auto g = grad_value_overdamped(q)[0][0];
            std::uint64_t side = 0;
            oracles::EstimateFn f = [&](std::span<const double> y) {
                HjbQuery r = q;
                r.points = {{y[0]}};
                r.seed = 2000 + 10 * trial + side++;
                return dynkin_value(r)[0];
            };
            std::vector<double> at{x};
            const auto fd = oracles::finite_diff_gradient(f, at, 1e-2)[0];
            agree += sigmas(g, fd) <= 3.0;
        }
        CHECK(agree >= 10);
    }
}

TEST_CASE("cocycle exponential and product agree to first order", "[bel][cocycle]")
{
    sde::DoubleWell u;
    sde::PhysicalParams p;
    auto grid = sde::make_grid(0.0, 0.2, 0.005);
    std::vector<double> start{0.5};
    for (std::uint64_t i = 0; i < 20; ++i) {
        sde::RandomStream s(4, 0, i);
        auto path = sde::simulate(sde::DynamicsKind::overdamped_forward, u, start, grid, p, s);
        double max_h = 0.0;
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
            max_h = std::max(max_h, std::abs(3 * path.state(k)[0] * path.state(k)[0] - 1));
        }
        auto c = scalar_cocycle(path, grid, u, p.mu);
        CHECK(std::abs(c.exponential - c.product) / c.exponential <= 10 * grid.step() * p.mu * max_h * 0.2);
    }
}

TEST_CASE("gradient estimator is linear in the terminal condition", "[bel][overdamped]")
{
    sde::DoubleWell u;
    HjbQuery q;
    q.potential = &u;
    q.grid = sde::make_grid(0.0, 0.2, 0.005);
    q.points = {{0.2}, {-0.7}};
    q.n_paths = 600;
    q.terminal.phi = [](std::span<const double> x) { return x[0]; };
    auto g1 = grad_value_overdamped(q);
    q.terminal.phi = [](std::span<const double> x) { return x[0] * x[0]; };
    auto g2 = grad_value_overdamped(q);
    q.terminal.phi = [](std::span<const double> x) { return 2 * x[0] - 3 * x[0] * x[0]; };
    auto g3 = grad_value_overdamped(q);
    for (int j = 0; j < 2; ++j) {
        CHECK(g3[j][0].mean == Catch::Approx(2 * g1[j][0].mean - 3 * g2[j][0].mean).epsilon(1e-12));
    }
}

TEST_CASE("gradient needs two steps of horizon", "[bel][overdamped]")
{
    sde::DoubleWell u;
    HjbQuery q;
    q.potential = &u;
    q.terminal = linear_phi({1.0});
    q.grid = sde::make_grid(0.0, 0.2, 0.005);
    q.time = 0.195;
    q.points = {{0.0}};
    CHECK_THROWS_AS(grad_value_overdamped(q), HorizonTooShort);
}

TEST_CASE("degenerate gradient of the free momentum", "[bel][underdamped]")
{
    sde::ZeroPotential zero;
    HjbQuery q;
    q.kind = sde::DynamicsKind::underdamped_forward;
    q.potential = &zero;
    q.terminal = linear_phi({0.0, 1.0});
    q.grid = sde::make_grid(0.0, 1.0, 0.01);
    q.points = {{0.0, 1.0}};
    q.n_paths = 20000;
    std::vector<double> v{1.0};
    auto g = grad_value_underdamped(q, v);
    CHECK(std::abs(g[0].mean - std::exp(-1.0)) <= std::max(0.02, 3 * g[0].std_error));

    q.terminal.phi = [](std::span<const double>) { return 4.0; };
    auto c = grad_value_underdamped(q, v);
    CHECK(std::abs(c[0].mean) <= 3 * c[0].std_error);

    CHECK_THROWS_AS(grad_value_underdamped(q, v, GradientDirection::position), Unsupported);
}

TEST_CASE("degenerate gradient with tau != 1", "[bel][underdamped]")
{
    sde::ZeroPotential zero;
    sde::PhysicalParams p;
    p.tau = 0.5;
    p.mass = 2.0;
    p.beta = 3.0;
    HjbQuery q;
    q.kind = sde::DynamicsKind::underdamped_forward;
    q.potential = &zero;
    q.params = p;
    q.terminal = linear_phi({0.0, 1.0});
    q.grid = sde::make_grid(0.0, 1.0, 0.005);
    q.points = {{0.0, 1.0}};
    q.n_paths = 20000;
    std::vector<double> v{1.0};
    auto g = grad_value_underdamped(q, v);
    const double expected = std::pow(1.0 - 0.005 / p.tau, 200);
    CHECK(std::abs(g[0].mean - expected) <= 3 * g[0].std_error);
}

TEST_CASE("prefix-sum weights equal the direct double sum", "[bel][underdamped]")
{
    SmoothPotential u(0.3, -0.5, 0.2);
    sde::PhysicalParams p;
    p.tau = 0.8;
    p.mass = 1.5;
    p.beta = 2.0;
    HjbQuery q;
    q.kind = sde::DynamicsKind::underdamped_forward;
    q.potential = &u;
    q.params = p;
    q.terminal.phi = [](std::span<const double> x) { return std::sin(x[0]) + x[1] * x[1]; };
    q.terminal.control_cost = bridge_cost_underdamped(p);
    q.grid = sde::make_grid(0.0, 0.5, 0.01);
    q.time = 0.1;
    q.points = {{0.4, -0.3}};
    q.n_paths = 7;
    q.seed = 12;
    std::vector<double> v{1.0};
    const auto fast = grad_value_underdamped(q, v)[0];

    const std::size_t n = q.grid.index_of(q.time);
    const std::size_t N = q.grid.n_steps();
    const double h = q.grid.step();
    sde::RunningMoments direct;
    for (std::size_t path = 0; path < q.n_paths; ++path) {
        sde::RandomStream s(q.seed, 0, path);
        auto sub = sde::TimeGrid(q.time, q.grid.t_end(), N - n);
        auto pth = sde::simulate(q.kind, u, q.points[0], sub, p, s);
        auto weight_to = [&](std::size_t i) {
            auto f = variational_field(v, q.time, q.grid.node(i), p.tau, p.mass);
            double w = 0.0;
            for (std::size_t k = n; k < i; ++k) {
                double hess;
                u.hessian(0.0, pth.state(k - n).first(1), std::span<double>(&hess, 1));
                w += pth.increment(k - n)[0] * f.h(q.grid.node(k) + 0.5 * h, std::span<const double>(&hess, 1))[0];
            }
            return w;
        };
        double r = 0.0;
        for (std::size_t i = n + 1; i < N; ++i) {
            double g;
            u.gradient(0.0, pth.state(i - n).first(1), std::span<double>(&g, 1));
            r += h * q.terminal.control_cost * g * g * weight_to(i);
        }
        const double sample = std::sqrt(p.tau * p.beta / (2 * p.mass)) *
                              (q.terminal.phi(pth.state(N - n)) * weight_to(N) + r);
        direct.add(sample);
    }
    CHECK(fast.mean == Catch::Approx(direct.mean).epsilon(1e-9));
}

TEST_CASE("degenerate gradient with bridge cost matches Dynkin differences", "[bel][underdamped]")
{
    sde::MonomialGrad u;
    sde::PhysicalParams p;
    HjbQuery q;
    q.kind = sde::DynamicsKind::underdamped_forward;
    q.potential = &u;
    q.params = p;
    q.terminal.phi = [](std::span<const double> x) { return 0.5 * x[0] * x[0] + 0.3 * x[1]; };
    q.terminal.control_cost = bridge_cost_underdamped(p);
    q.grid = sde::make_grid(0.0, 0.5, 0.01);
    q.n_paths = 20000;
    q.workers = 2;
    std::vector<double> v{1.0};
    int agree = 0;
    for (double x : {-0.5, 0.0, 0.5}) {
        for (double m : {-0.5, 0.0, 0.5}) {
            q.points = {{x, m}};
            q.seed = 31;
            const auto g = grad_value_underdamped(q, v)[0];
            q.points = {{x, m + 1e-2}};
            q.seed = 32;
            const auto vp = dynkin_value(q)[0];
            q.points = {{x, m - 1e-2}};
            q.seed = 33;
            const auto vm = dynkin_value(q)[0];
            WeightedEstimate fd;
            fd.mean = (vp.mean - vm.mean) / 2e-2;
            fd.std_error = std::hypot(vp.std_error, vm.std_error) / 2e-2;
            agree += sigmas(g, fd) <= 3.0;
        }
    }
    CHECK(agree >= 8);
}
