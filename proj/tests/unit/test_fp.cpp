#include "stochctl/errors.hpp"
#include "stochctl/fp/density.hpp"
#include "stochctl/fp/girsanov.hpp"
#include "stochctl/fp/smoothing.hpp"
#include "stochctl/sde/potential.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace stochctl;
using namespace stochctl::fp;

namespace {
DensityQuery base_query(const sde::PotentialModel& u, const Density& p0, double t_end, double h)
{
    DensityQuery q;
    q.grid = sde::make_grid(0.0, t_end, h);
    q.eval_time = t_end;
    q.potential = &u;
    q.initial_density = &p0;
    q.seed = 17;
    return q;
}
} // namespace

TEST_CASE("free diffusion of a standard normal", "[fp]")
{
    sde::ZeroPotential u;
    auto p0 = GaussianDensity::isotropic({0.0}, 1.0);
    auto q = base_query(u, p0, 0.5, 0.01);
    q.eval_points = {{0.0}, {1.0}};
    q.n_paths = 20000;
    auto est = density_overdamped(q);
    const double expected = 1.0 / std::sqrt(4 * std::numbers::pi);
    CHECK(std::abs(est[0].mean - expected) <= 3 * est[0].std_error);
    const double e1 = expected * std::exp(-0.25);
    CHECK(std::abs(est[1].mean - e1) <= 3 * est[1].std_error);
    CHECK(est[0].mean_weight == 1.0);
}

TEST_CASE("zero potential weights are exactly one", "[fp]")
{
    sde::ZeroPotential u;
    ConstantDensity one(1);
    auto q = base_query(u, one, 0.3, 0.01);
    q.eval_points = {{0.2}, {-1.0}};
    q.n_paths = 500;
    for (const auto& e : density_overdamped(q)) {
        CHECK(e.mean == 1.0);
        CHECK(e.std_error == 0.0);
        CHECK(e.mean_weight == 1.0);
    }
}

TEST_CASE("bare Girsanov factor has mean one", "[fp]")
{
    sde::DoubleWell u;
    ConstantDensity one(1);
    auto q = base_query(u, one, 0.2, 0.005);
    q.eval_points = {{0.0}, {1.5}};
    q.n_paths = 10000;
    auto est = density_overdamped(q);
    for (const auto& e : est) {
        CHECK(e.n_samples == 10000);
    }
    // mean_weight carries no standard error of its own; recompute a direct bound
    // using the weight spread at one point
    CHECK(std::abs(est[0].mean_weight - 1.0) < 0.02);
    CHECK(std::abs(est[1].mean_weight - 1.0) < 0.05);
}

TEST_CASE("quartic relaxation reaches equilibrium at the origin", "[fp]")
{
    sde::MonomialGrad u;
    auto p0 = GaussianDensity::isotropic({0.0}, 1.0);
    auto q = base_query(u, p0, 0.75, 1e-3);
    q.eval_points = {{0.0}};
    q.n_paths = 2000;
    q.workers = 2;
    auto est = density_overdamped(q);
    CHECK(std::abs(est[0].mean - 0.4639) <= 0.05);
}

TEST_CASE("results do not depend on worker count", "[fp]")
{
    sde::DoubleWell u;
    auto p0 = GaussianDensity::isotropic({0.0}, 1.0);
    auto q = base_query(u, p0, 0.2, 0.005);
    q.eval_points = {{-1.0}, {0.0}, {0.5}};
    q.n_paths = 700;
    auto a = density_overdamped(q);
    q.workers = 4;
    auto b = density_overdamped(q);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(a[j].mean == b[j].mean);
        CHECK(a[j].std_error == b[j].std_error);
        CHECK(a[j].mean_weight == b[j].mean_weight);
    }
}

TEST_CASE("underdamped estimator at zero steps returns the initial density", "[fp]")
{
    sde::DoubleWell u;
    auto p0 = ProductDensity(std::make_shared<GaussianDensity>(GaussianDensity::isotropic({0.0}, 1.0)),
                             maxwell_boltzmann(1, 1.0, 1.0));
    auto q = base_query(u, p0, 0.5, 0.01);
    q.eval_time = 0.0;
    q.eval_points = {{0.3, -0.4}};
    q.n_paths = 10;
    auto est = density_underdamped(q);
    CHECK(est[0].mean == p0(std::vector<double>{0.3, -0.4}));
}

TEST_CASE("momentum marginal stays Maxwell-Boltzmann", "[fp]")
{
    sde::ZeroPotential u;
    auto p0 = ProductDensity(std::make_shared<GaussianDensity>(GaussianDensity::isotropic({0.0}, 1.0)),
                             maxwell_boltzmann(1, 1.0, 1.0));
    auto q = base_query(u, p0, 0.5, 0.01);
    q.eval_points = {{0.0, -1.0}, {0.0, 0.0}, {0.0, 1.0}};
    q.n_paths = 20000;
    q.workers = 2;
    auto est = density_underdamped(q);
    // the joint density at q = 0 factorizes; the q-marginal is N(0, 1 + ...) known
    // only through the same estimate, so compare ratios against the Gaussian.
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(est[i].mean_weight - 1.0) < 0.05);
    }
    const double r1 = est[0].mean / est[1].mean;
    const double r2 = est[2].mean / est[1].mean;
    CHECK(std::abs(r1 - std::exp(-0.5)) < 0.05);
    CHECK(std::abs(r2 - std::exp(-0.5)) < 0.05);
}

TEST_CASE("box smoothing", "[fp][smoothing]")
{
    std::vector<double> v{1.0, 5.0, 2.0, 7.0};
    CHECK(box_smooth(v, 0) == v);
    CHECK(box_smooth(std::vector<double>(9, 3.5), 2) == std::vector<double>(9, 3.5));

    const double dx = 0.1;
    std::vector<double> spike(101, 0.0);
    spike[50] = 1.0 / dx;
    auto s = box_smooth(spike, 2);
    double mass = 0.0;
    for (double x : s) {
        mass += x * dx;
    }
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(box_smooth(v, 1)[0] == 3.0);
}

TEST_CASE("normalization", "[fp][smoothing]")
{
    auto n = normalize(std::vector<double>(101, 1.0), 0.01);
    CHECK(n.mass == Catch::Approx(1.01));
    CHECK(n.density[0] == Catch::Approx(0.990).epsilon(1e-3));
    CHECK_THROWS_AS(normalize(std::vector<double>(5, 0.0), 0.1), ZeroMass);

    std::vector<double> g(161);
    for (int i = 0; i <= 160; ++i) {
        const double x = -8 + 0.1 * i;
        g[i] = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    }
    CHECK(std::abs(normalize(g, 0.1).mass - 1.0) < 0.02);
}
