#include "stochctl/fp/girsanov.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/sde/parallel.hpp"
#include "stochctl/sde/random.hpp"
#include "stochctl/sde/simulate.hpp"

#include <cmath>
#include <sstream>

namespace stochctl::fp {

namespace {

struct Acc {
    sde::LogMoments estimate;
    sde::LogMoments weight;
    void merge(const Acc& o)
    {
        estimate.merge(o.estimate);
        weight.merge(o.weight);
    }
};

std::string describe(std::size_t j, const std::vector<double>& x)
{
    std::ostringstream s;
    s << "point " << j << " (";
    for (std::size_t i = 0; i < x.size(); ++i) {
        s << (i ? ", " : "") << x[i];
    }
    s << "): ";
    return s.str();
}

template <class Fn>
void at_point(std::size_t j, const std::vector<double>& x, Fn&& fn)
{
    try {
        fn();
    } catch (const NonFiniteState& e) {
        throw NonFiniteState(describe(j, x) + e.what());
    } catch (const DegenerateWeight& e) {
        throw DegenerateWeight(describe(j, x) + e.what());
    }
}

void validate(const DensityQuery& q, std::size_t state_dim)
{
    q.params.validate();
    if (!q.potential || !q.initial_density) {
        throw InvalidInput("density query needs a potential and an initial density");
    }
    if (q.n_paths < 1) {
        throw InvalidInput("n_paths must be >= 1");
    }
    sde::check_dim(*q.potential, q.params.dim);
    if (q.initial_density->dim() != state_dim) {
        throw InvalidInput("initial density dimension does not match the state");
    }
    for (const auto& x : q.eval_points) {
        if (x.size() != state_dim) {
            throw InvalidInput("evaluation point has the wrong dimension");
        }
    }
}

std::vector<WeightedEstimate> finish(const DensityQuery& q, const std::vector<Acc>& acc)
{
    std::vector<WeightedEstimate> out(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) {
        at_point(j, q.eval_points[j], [&] {
            out[j].mean = acc[j].estimate.value();
            out[j].std_error = acc[j].estimate.std_error();
            out[j].n_samples = acc[j].estimate.n;
            out[j].mean_weight = acc[j].weight.value();
            out[j].weight_std_error = acc[j].weight.std_error();
        });
    }
    return out;
}

double dot(const double* a, const double* b, std::size_t d)
{
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace

std::vector<WeightedEstimate> density_overdamped(const DensityQuery& query)
{
    const std::size_t d = query.params.dim;
    validate(query, d);
    const auto& grid = query.grid;
    const std::size_t n = grid.index_of(query.eval_time);
    const auto& u = *query.potential;
    const auto& p0 = *query.initial_density;
    const auto& par = query.params;
    const double h = grid.step();
    const double c1 = h * par.mu * par.beta / 4.0;
    const double c2 = std::sqrt(h * par.mu * par.beta / 2.0);
    const bool free = u.is_zero();

    auto acc = sde::reduce_paths<Acc>(
        query.eval_points.size(), query.n_paths, query.workers,
        [&](std::size_t j, std::size_t first, std::size_t last, Acc& a) {
            at_point(j, query.eval_points[j], [&] {
                std::vector<double> q(d), eps(d), g_prev(d), g_next(d);
                for (std::size_t path = first; path < last; ++path) {
                    sde::RandomStream stream(query.seed, j, path);
                    q = query.eval_points[j];
                    double g = 0.0;
                    double log_rn = 0.0;
                    if (!free && n > 0) {
                        u.gradient(grid.node(n), q, g_prev);
                    }
                    for (std::size_t k = n; k > 0; --k) {
                        stream.fill_normal(eps);
                        sde::step::overdamped_backward_free(q, eps, par, h);
                        sde::step::check_finite(q, grid.node(k - 1));
                        if (free) {
                            continue;
                        }
                        u.gradient(grid.node(k - 1), q, g_next);
                        g += c1 * dot(g_next.data(), g_next.data(), d) + c2 * dot(g_next.data(), eps.data(), d);
                        log_rn += c2 * dot(g_prev.data(), eps.data(), d) - c1 * dot(g_prev.data(), g_prev.data(), d);
                        std::swap(g_prev, g_next);
                    }
                    a.estimate.add(p0.log_value(q) - g);
                    a.weight.add(log_rn);
                }
            });
        });
    return finish(query, acc);
}

std::vector<WeightedEstimate> density_underdamped(const DensityQuery& query)
{
    const std::size_t d = query.params.dim;
    validate(query, 2 * d);
    const auto& grid = query.grid;
    const std::size_t n = grid.index_of(query.eval_time);
    const auto& u = *query.potential;
    const auto& p0 = *query.initial_density;
    const auto& par = query.params;
    const double h = grid.step();
    const double c1 = h * par.beta / (4.0 * par.mass * par.tau);
    const double c2 = std::sqrt(h * par.beta / (2.0 * par.mass * par.tau));

    auto acc = sde::reduce_paths<Acc>(
        query.eval_points.size(), query.n_paths, query.workers,
        [&](std::size_t j, std::size_t first, std::size_t last, Acc& a) {
            at_point(j, query.eval_points[j], [&] {
                std::vector<double> x(2 * d), eps(d), grad(d), p_old(d);
                for (std::size_t path = first; path < last; ++path) {
                    sde::RandomStream stream(query.seed, j, path);
                    x = query.eval_points[j];
                    double g = 0.0;
                    double log_rn = 0.0;
                    const double* p = x.data() + d;
                    for (std::size_t k = n; k > 0; --k) {
                        stream.fill_normal(eps);
                        std::copy(p, p + d, p_old.begin());
                        sde::step::underdamped_backward(u, grid.node(k), x, eps, par, h, grad);
                        sde::step::check_finite(x, grid.node(k - 1));
                        g += c1 * dot(p, p, d) + c2 * dot(eps.data(), p, d);
                        log_rn += c2 * dot(eps.data(), p_old.data(), d) - c1 * dot(p_old.data(), p_old.data(), d);
                    }
                    a.estimate.add(p0.log_value(x) - g);
                    a.weight.add(log_rn);
                }
            });
        });
    return finish(query, acc);
}

} // namespace stochctl::fp
