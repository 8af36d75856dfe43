#include "stochctl/errors.hpp"
#include "stochctl/oracles/finite_diff.hpp"
#include "stochctl/oracles/gaussian_bridge.hpp"
#include "stochctl/oracles/histogram.hpp"
#include "stochctl/oracles/linear_gaussian.hpp"
#include "stochctl/oracles/quadrature.hpp"

#include <catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

using namespace stochctl;
using namespace stochctl::oracles;

namespace {
OUSpec scalar_ou(double u0, double m0, double v0)
{
    OUSpec s;
    s.stiffness = [u0](double) { return Eigen::MatrixXd::Constant(1, 1, u0); };
    s.mean0 = Eigen::VectorXd::Constant(1, m0);
    s.cov0 = Eigen::MatrixXd::Constant(1, 1, v0);
    return s;
}
} // namespace

TEST_CASE("OU oracle closed forms", "[oracles][ou]")
{
    auto heat = scalar_ou(0.0, 0.3, 0.5);
    heat.params.mu = 0.8;
    heat.params.beta = 2.0;
    auto m = ou_moments(heat, 1.5);
    CHECK(m.cov(0, 0) == Catch::Approx(0.5 + 2 * 0.8 * 1.5 / 2.0).epsilon(1e-12));
    CHECK(m.mean[0] == Catch::Approx(0.3));

    auto eq = scalar_ou(2.0, 0.0, 0.5); // 1 / (beta u0)
    auto m0 = ou_moments(eq, 0.0);
    auto m1 = ou_moments(eq, 3.0);
    CHECK(m1.cov(0, 0) == Catch::Approx(m0.cov(0, 0)).epsilon(1e-10));

    auto s = scalar_ou(1.0, 0.7, 1.0);
    auto m2 = ou_moments(s, 0.5);
    CHECK(m2.cov(0, 0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(m2.mean[0] == Catch::Approx(0.7 * std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("OU density integrates to one", "[oracles][ou]")
{
    OUSpec s;
    s.stiffness = [](double t) {
        Eigen::MatrixXd k(1, 1);
        k << 1.0 + 0.5 * std::sin(t);
        return k;
    };
    s.mean0 = Eigen::VectorXd::Constant(1, 0.5);
    s.cov0 = Eigen::MatrixXd::Constant(1, 1, 0.3);
    const auto m = ou_moments(s, 0.8);
    const double sd = std::sqrt(m.cov(0, 0));
    const int n = 4000;
    const double lo = m.mean[0] - 8 * sd, hi = m.mean[0] + 8 * sd, dx = (hi - lo) / n;
    double z = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * dx;
        z += (i == 0 || i == n ? 0.5 : 1.0) * m.pdf(std::span<const double>(&x, 1));
    }
    CHECK(std::abs(z * dx - 1.0) < 1e-6);
}

TEST_CASE("underdamped linear oracle relaxes to Maxwell-Boltzmann", "[oracles][ou]")
{
    sde::PhysicalParams p;
    p.tau = 0.5;
    p.mass = 2.0;
    p.beta = 1.5;
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(1, 1, 1.0);
    Eigen::VectorXd m0 = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd c0 = Eigen::MatrixXd::Identity(2, 2);
    c0(0, 0) = 1.0 / p.beta;
    c0(1, 1) = p.mass / p.beta;
    auto m = linear_gaussian_moments(underdamped_linear(k, p, m0, c0), 2.0);
    CHECK(m.cov(0, 0) == Catch::Approx(c0(0, 0)).epsilon(1e-9));
    CHECK(m.cov(1, 1) == Catch::Approx(c0(1, 1)).epsilon(1e-9));
    CHECK(std::abs(m.cov(0, 1)) < 1e-9);
}

TEST_CASE("equilibrium quadrature", "[oracles][quadrature]")
{
    auto half = std::make_shared<sde::QuadraticMatrix>(1, std::vector<double>{1.0});
    auto n = equilibrium_quadrature(half, 1.0, -12.0, 12.0, 4001);
    CHECK(std::abs(n(0.0) - 1.0 / std::sqrt(2 * std::numbers::pi)) < 1e-6);

    auto quartic = std::make_shared<sde::MonomialGrad>();
    auto a = equilibrium_quadrature(quartic, 1.0, -6.0, 6.0, 10000);
    auto b = equilibrium_quadrature(quartic, 1.0, -6.0, 6.0, 20000);
    CHECK(a(0.0) == Catch::Approx(0.46386).margin(5e-5));
    CHECK(std::abs(a.normalizer() / b.normalizer() - 1.0) < 1e-8);
    CHECK(a.normalizer() == Catch::Approx(2.1558).margin(1e-4));
}

TEST_CASE("histogram of free diffusion", "[oracles][histogram]")
{
    sde::ZeroPotential zero;
    sde::PhysicalParams p;
    auto grid = sde::make_grid(0.0, 0.5, 0.01);
    InitialSampler start = [](std::mt19937_64& g) { return std::normal_distribution<double>()(g); };
    const std::size_t n = 10000, bins = 20;
    auto hist = histogram_density(zero, start, grid, p, n, bins, -4.0, 4.0, 99);
    boost::math::normal target(0.0, std::sqrt(2.0));
    double chi2 = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = hist.lo + b * hist.width();
        const double e = n * (boost::math::cdf(target, lo + hist.width()) - boost::math::cdf(target, lo));
        if (e >= 5.0) {
            chi2 += (hist.counts[b] - e) * (hist.counts[b] - e) / e;
            ++used;
        }
    }
    boost::math::chi_squared dist(static_cast<double>(used - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);

    CHECK_THROWS_AS(histogram_density(zero, start, grid, p, 0, bins, -4.0, 4.0, 1), EmptyEnsemble);
    InitialSampler fixed = [](std::mt19937_64&) { return 0.3; };
    auto single = histogram_density(zero, fixed, grid, p, 50, bins, -4.0, 4.0, 1, 0.0);
    std::size_t occupied = 0;
    for (auto c : single.counts) {
        occupied += c > 0;
    }
    CHECK(occupied == 1);
}

TEST_CASE("finite differences", "[oracles][finite_diff]")
{
    EstimateFn square = [](std::span<const double> x) {
        sde::WeightedEstimate e;
        e.mean = x[0] * x[0];
        e.std_error = 0.01;
        return e;
    };
    std::vector<double> one{1.0};
    auto g = finite_diff_gradient(square, one, 0.1);
    CHECK(g[0].mean == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(g[0].std_error == Catch::Approx(std::sqrt(2.0) * 0.01 / 0.2));
    EstimateFn linear = [](std::span<const double> x) {
        sde::WeightedEstimate e;
        e.mean = 3.0 * x[0] - 2.0 * x[1];
        return e;
    };
    std::vector<double> pt{0.25, 0.5};
    auto l = finite_diff_gradient(linear, pt, 0.5);
    CHECK(l[0].mean == 3.0);
    CHECK(l[1].mean == -2.0);
}

TEST_CASE("Gaussian bridge oracle", "[oracles][bridge]")
{
    sde::PhysicalParams p;
    GaussianBridge b(1.0, 0.5, 2.0, 0.8, p, 1.0);
    CHECK(b.moments(0.0).mean == 1.0);
    CHECK(b.moments(0.0).variance == 0.5);
    CHECK(b.moments(1.0).mean == 2.0);
    CHECK(b.moments(1.0).variance == Catch::Approx(0.8).epsilon(1e-14));

    GaussianBridge sym(-1.0, 0.7, 1.0, 0.7, p, 0.4);
    CHECK(sym.moments(0.2).mean == Catch::Approx(0.0).margin(1e-14));

    // phi * phi_hat must reproduce the marginal at every time
    for (double t : {0.0, 0.3, 0.5, 1.0}) {
        // quadratic fit of the log product from three points
        auto lp = [&](double x) { return b.log_phi(t, x) + b.log_phi_hat(t, x); };
        const double f0 = lp(0.0), f1 = lp(1.0), fm = lp(-1.0);
        const double curv = f1 + fm - 2 * f0; // -1 / var
        const double slope = 0.5 * (f1 - fm); // mean / var
        const auto m = b.moments(t);
        CHECK(-1.0 / curv == Catch::Approx(m.variance).epsilon(1e-9));
        CHECK(-slope / curv == Catch::Approx(m.mean).epsilon(1e-9));
    }
}
