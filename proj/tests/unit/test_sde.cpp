#include "stochctl/errors.hpp"
#include "stochctl/sde/interpolation.hpp"
#include "stochctl/sde/parallel.hpp"
#include "stochctl/sde/potential.hpp"
#include "stochctl/sde/random.hpp"
#include "stochctl/sde/simulate.hpp"
#include "stochctl/sde/stats.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

using namespace stochctl;
using namespace stochctl::sde;

TEST_CASE("grid node counts and exact end node", "[sde][grid]")
{
    CHECK(make_grid(0.0, 0.2, 0.005).n_nodes() == 41);
    CHECK(make_grid(0.0, 0.75, 0.001).n_nodes() == 751);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.3), NonIntegerSpan);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 0.1), InvalidInput);

    auto g = make_grid(0.0, 0.75, 0.001);
    CHECK(g.node(g.n_steps()) == 0.75);
    CHECK(g.node(10) == 10 * g.step());
    CHECK(g.index_of(0.5) == 500);
    CHECK_THROWS_AS(g.index_of(0.5005), InvalidInput);
}

TEST_CASE("streams are reproducible and keyed", "[sde][random]")
{
    auto grid = make_grid(0.0, 1.0, 0.01);
    RandomStream a(7, 3, 11), b(7, 3, 11), c(7, 3, 12), e(7, 4, 11);
    auto xa = sample_increments(grid, 2, a);
    auto xb = sample_increments(grid, 2, b);
    auto xc = sample_increments(grid, 2, c);
    auto xe = sample_increments(grid, 2, e);
    CHECK(xa == xb);
    CHECK(xa != xc);
    CHECK(xa != xe);
    CHECK(xa.size() == 200);
}

TEST_CASE("standard normal draws have the right moments", "[sde][random]")
{
    RandomStream s(2024, 0, 0);
    const int n = 100000;
    RunningMoments m;
    for (int i = 0; i < n; ++i) {
        m.add(s.normal());
    }
    CHECK(std::abs(m.mean) < 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(m.variance() - 1.0) < 0.05);
}

TEST_CASE("merged moments match a single pass", "[sde][stats]")
{
    RandomStream s(1, 2, 3);
    RunningMoments all, a, b;
    LogMoments lall, la, lb;
    for (int i = 0; i < 1000; ++i) {
        const double x = s.normal();
        all.add(x);
        (i < 300 ? a : b).add(x);
        lall.add(3 * x);
        (i < 300 ? la : lb).add(3 * x);
    }
    a.merge(b);
    la.merge(lb);
    CHECK(a.n == all.n);
    CHECK(a.mean == Catch::Approx(all.mean).epsilon(1e-12));
    CHECK(a.m2 == Catch::Approx(all.m2).epsilon(1e-12));
    CHECK(la.value() == Catch::Approx(lall.value()).epsilon(1e-12));
    CHECK(la.std_error() == Catch::Approx(lall.std_error()).epsilon(1e-10));

    RunningMoments direct;
    RandomStream s2(1, 2, 3);
    for (int i = 0; i < 1000; ++i) {
        direct.add(std::exp(3 * s2.normal()));
    }
    CHECK(lall.value() == Catch::Approx(direct.mean).epsilon(1e-10));
}

TEST_CASE("log moments survive weights far outside double range", "[sde][stats]")
{
    LogMoments m;
    m.add(-2000.0);
    m.add(-2000.0 + std::log(3.0));
    CHECK(m.log_value() == Catch::Approx(-2000.0 + std::log(2.0)));
    CHECK_THROWS_AS(m.value(), DegenerateWeight);
}

TEST_CASE("reduction does not depend on worker count", "[sde][parallel]")
{
    struct Acc {
        RunningMoments m;
        void merge(const Acc& o) { m.merge(o.m); }
    };
    auto run = [](std::size_t workers) {
        return reduce_paths<Acc>(5, 1000, workers, [](std::size_t j, std::size_t a, std::size_t b, Acc& acc) {
            for (std::size_t i = a; i < b; ++i) {
                RandomStream s(9, j, i);
                acc.m.add(s.normal());
            }
        });
    };
    auto one = run(1);
    auto four = run(4);
    for (int j = 0; j < 5; ++j) {
        CHECK(one[j].m.mean == four[j].m.mean);
        CHECK(one[j].m.m2 == four[j].m.m2);
    }
}

TEST_CASE("parallel_for rethrows the lowest failing item", "[sde][parallel]")
{
    auto body = [](std::size_t i) {
        if (i == 17 || i == 40) {
            throw std::runtime_error("item " + std::to_string(i));
        }
    };
    for (std::size_t w : {1, 4}) {
        try {
            parallel_for(64, w, body);
            FAIL("expected a throw");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "item 17");
        }
    }
}

TEST_CASE("zero noise paths", "[sde][simulate]")
{
    PhysicalParams p;
    ZeroPotential zero;
    auto one_step = TimeGrid(0.0, 0.1, 1);
    std::vector<double> z1(1, 0.0);

    std::vector<double> x0{0.0, 1.0};
    auto f = simulate(DynamicsKind::underdamped_forward, zero, x0, one_step, p, z1);
    CHECK(f.state(1)[0] == Catch::Approx(0.1));
    CHECK(f.state(1)[1] == Catch::Approx(0.9));

    auto b = simulate(DynamicsKind::underdamped_backward, zero, x0, one_step, p, z1);
    CHECK(b.state(0)[0] == Catch::Approx(-0.1));
    CHECK(b.state(0)[1] == Catch::Approx(1.0));
    CHECK(b.state(1)[0] == 0.0);

    auto grid = make_grid(0.0, 1.0, 0.1);
    std::vector<double> z(grid.n_steps(), 0.0);
    std::vector<double> q0{0.3};
    auto free = simulate(DynamicsKind::overdamped_backward_free, zero, q0, grid, p, z);
    for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
        CHECK(free.state(k)[0] == 0.3);
    }
}

TEST_CASE("backward paths are stored in physical time order", "[sde][simulate]")
{
    PhysicalParams p;
    DoubleWell u;
    auto grid = make_grid(0.0, 0.5, 0.1);
    RandomStream s(3, 0, 0);
    std::vector<double> q0{0.5};
    auto path = simulate(DynamicsKind::overdamped_backward_free, u, q0, grid, p, s);
    CHECK(path.state(grid.n_steps())[0] == 0.5);
    RandomStream s2(3, 0, 0);
    auto eps = sample_increments(grid, 1, s2);
    // the first draw moves the path from t_end to the node before it
    CHECK(path.state(4)[0] == Catch::Approx(0.5 - std::sqrt(2 * 0.1) * eps[0]));
    CHECK(path.increment(4)[0] == Catch::Approx(std::sqrt(0.1) * eps[0]));
}

TEST_CASE("free backward displacement variance", "[sde][simulate]")
{
    PhysicalParams p;
    p.mu = 0.7;
    p.beta = 2.0;
    ZeroPotential zero;
    auto grid = make_grid(0.0, 0.4, 0.01);
    std::vector<double> q0{0.0};
    auto ens = simulate_ensemble(DynamicsKind::overdamped_backward_free, zero, q0, grid, p, 10000, 5, 0, 2);
    RunningMoments m;
    RunningMoments inc;
    for (const auto& path : ens.paths) {
        m.add(path.state(0)[0] - path.state(grid.n_steps())[0]);
        inc.add(path.increment(7)[0]);
    }
    CHECK(std::abs(m.variance() / (2 * p.mu * 0.4 / p.beta) - 1.0) < 0.05);
    CHECK(std::abs(inc.variance() / grid.step() - 1.0) < 0.05);
}

TEST_CASE("ensembles do not depend on worker count", "[sde][simulate]")
{
    PhysicalParams p;
    DoubleWell u;
    auto grid = make_grid(0.0, 0.2, 0.005);
    std::vector<double> q0{0.2};
    auto a = simulate_ensemble(DynamicsKind::overdamped_forward, u, q0, grid, p, 50, 11, 2, 1);
    auto b = simulate_ensemble(DynamicsKind::overdamped_forward, u, q0, grid, p, 50, 11, 2, 4);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(a.paths[i].states == b.paths[i].states);
    }
}

TEST_CASE("drift blow-up is reported", "[sde][simulate]")
{
    PhysicalParams p;
    MonomialGrad u;
    auto grid = make_grid(0.0, 5.0, 0.5);
    std::vector<double> z(grid.n_steps(), 0.0);
    std::vector<double> q0{10.0};
    CHECK_THROWS_AS(simulate(DynamicsKind::overdamped_forward, u, q0, grid, p, z), NonFiniteState);
}

namespace {
void check_derivatives(const PotentialModel& u, std::mt19937_64& gen, double range)
{
    const std::size_t d = u.dim();
    std::uniform_real_distribution<double> tq(-range, range), tt(0.0, 1.0);
    const double e = 1e-4;
    std::vector<double> g(d), gp(d), gm(d), hess(d * d);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q(d);
        for (auto& x : q) {
            x = tq(gen);
        }
        const double t = tt(gen);
        u.gradient(t, q, g);
        u.hessian(t, q, hess);
        for (std::size_t i = 0; i < d; ++i) {
            auto qp = q, qm = q;
            qp[i] += e;
            qm[i] -= e;
            const double fd = (u.value(t, qp) - u.value(t, qm)) / (2 * e);
            CHECK(std::abs(g[i] - fd) <= 1e-5 * (1 + std::abs(g[i])));
            u.gradient(t, qp, gp);
            u.gradient(t, qm, gm);
            for (std::size_t k = 0; k < d; ++k) {
                const double fh = (gp[k] - gm[k]) / (2 * e);
                CHECK(std::abs(hess[k * d + i] - fh) <= 1e-5 * (1 + std::abs(hess[k * d + i])));
            }
        }
    }
}
} // namespace

TEST_CASE("gradients and Hessians match finite differences", "[sde][potential]")
{
    std::mt19937_64 gen(42);
    check_derivatives(QuarticShift(), gen, 2.0);
    check_derivatives(DoubleWell(2), gen, 2.0);
    check_derivatives(MonomialGrad(), gen, 2.0);
    check_derivatives(QuadraticMatrix(2, {2.0, 0.5, 0.5, 1.0}), gen, 2.0);
    check_derivatives(QuadraticMatrix(
                          1, [](double t) { return std::vector<double>{1.0 + t * t}; },
                          [](double t) { return std::vector<double>{2 * t}; }),
                      gen, 2.0);

    double q = 0.3;
    QuadraticMatrix tv(1, [](double t) { return std::vector<double>{1.0 + t * t}; });
    CHECK(tv.time_derivative(0.5, std::span<const double>(&q, 1)) == Catch::Approx(0.5 * q * q * 1.0).epsilon(1e-6));
}

TEST_CASE("monotone cubic interpolation", "[sde][interpolation]")
{
    UniformAxis ax(0.0, 1.0, 11);
    std::vector<double> y(11);
    for (std::size_t j = 0; j < 11; ++j) {
        y[j] = std::pow(ax[j], 3);
    }
    MonotoneCubic f(ax, y);
    for (std::size_t j = 0; j < 11; ++j) {
        CHECK(f(ax[j]) == y[j]);
    }
    CHECK(f(-5.0) == 0.0);
    CHECK(f(5.0) == 1.0);
    CHECK(f.derivative(5.0) == 0.0);
    CHECK(f(0.55) == Catch::Approx(std::pow(0.55, 3)).margin(2e-3));
    // monotone data stays monotone
    double prev = f(0.0);
    for (int i = 1; i <= 200; ++i) {
        const double now = f(i / 200.0);
        CHECK(now >= prev);
        prev = now;
    }
    // derivative agrees with finite differences of the interpolant
    const double e = 1e-6;
    CHECK(f.derivative(0.43) == Catch::Approx((f(0.43 + e) - f(0.43 - e)) / (2 * e)).epsilon(1e-5));

    auto d = grid_derivative(std::vector<double>{0.0, 1.0, 4.0, 9.0, 16.0}, 1.0);
    CHECK(d == std::vector<double>{0.0, 2.0, 4.0, 6.0, 8.0});
}

TEST_CASE("tabulated drift interpolates linearly in time and clamps in space", "[sde][potential]")
{
    TimeGrid times(0.0, 1.0, 2);
    UniformAxis ax(-1.0, 1.0, 21);
    std::vector<std::vector<double>> grad(3, std::vector<double>(21)), val(3, std::vector<double>(21));
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t j = 0; j < 21; ++j) {
            grad[k][j] = (1.0 + k) * ax[j];
            val[k][j] = 0.5 * (1.0 + k) * ax[j] * ax[j];
        }
    }
    TabulatedDrift u(times, ax, grad, val);
    std::vector<double> out(1);
    double q = 0.35;
    u.gradient(0.25, std::span<const double>(&q, 1), out);
    CHECK(out[0] == Catch::Approx(1.5 * 0.35).epsilon(1e-6));
    u.gradient(1.0, std::span<const double>(&q, 1), out);
    CHECK(out[0] == Catch::Approx(3 * 0.35).epsilon(1e-6));
    double far = 4.0;
    u.gradient(0.5, std::span<const double>(&far, 1), out);
    CHECK(out[0] == Catch::Approx(2.0));
    u.hessian(0.5, std::span<const double>(&q, 1), out);
    CHECK(out[0] == Catch::Approx(2.0).epsilon(1e-3));
    CHECK(u.value(0.75, std::span<const double>(&q, 1)) == Catch::Approx(0.5 * 2.5 * q * q).epsilon(1e-3));
    CHECK(u.time_derivative(0.75, std::span<const double>(&q, 1)) == Catch::Approx(q * q).epsilon(1e-3));
}
