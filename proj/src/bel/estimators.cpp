#include "stochctl/bel/estimators.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/sde/parallel.hpp"
#include "stochctl/sde/random.hpp"

#include <cmath>
#include <sstream>

namespace stochctl::bel {

namespace {

double dot(const double* a, const double* b, std::size_t d)
{
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

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
    }
}

std::size_t validate(const HjbQuery& q, std::size_t state_dim)
{
    q.params.validate();
    if (!q.potential || !q.terminal.phi) {
        throw InvalidInput("value query needs a potential and a terminal condition");
    }
    if (q.n_paths < 1) {
        throw InvalidInput("n_paths must be >= 1");
    }
    sde::check_dim(*q.potential, q.params.dim);
    for (const auto& x : q.points) {
        if (x.size() != state_dim) {
            throw InvalidInput("query point has the wrong dimension");
        }
    }
    const std::size_t n = q.grid.index_of(q.time);
    if (n >= q.grid.n_steps()) {
        throw HorizonTooShort("query time must precede the end of the grid");
    }
    return n;
}

inline double running(const TerminalData& td, double t, std::span<const double> x, const double* grad,
                      std::size_t d)
{
    double f = td.control_cost != 0.0 ? td.control_cost * dot(grad, grad, d) : 0.0;
    if (td.running_cost) {
        f += td.running_cost(t, x);
    }
    return f;
}

struct Moments {
    sde::RunningMoments m;
    void merge(const Moments& o) { m.merge(o.m); }
};

struct VectorMoments {
    std::vector<sde::RunningMoments> m;
    void merge(const VectorMoments& o)
    {
        if (m.empty()) {
            m = o.m;
            return;
        }
        for (std::size_t i = 0; i < o.m.size(); ++i) {
            m[i].merge(o.m[i]);
        }
    }
};

} // namespace

std::vector<WeightedEstimate> dynkin_value(const HjbQuery& query)
{
    const std::size_t d = query.params.dim;
    const bool under = sde::is_underdamped(query.kind);
    if (sde::direction_of(query.kind) != sde::Direction::forward) {
        throw InvalidInput("value estimates use forward dynamics");
    }
    const std::size_t sd = under ? 2 * d : d;
    const std::size_t n = validate(query, sd);
    const auto& grid = query.grid;
    const auto& u = *query.potential;
    const auto& par = query.params;
    const auto& td = query.terminal;
    const double h = grid.step();
    const std::size_t N = grid.n_steps();

    auto acc = sde::reduce_paths<Moments>(
        query.points.size(), query.n_paths, query.workers,
        [&](std::size_t j, std::size_t first, std::size_t last, Moments& a) {
            at_point(j, query.points[j], [&] {
                std::vector<double> x(sd), eps(d), grad(d);
                for (std::size_t path = first; path < last; ++path) {
                    sde::RandomStream stream(query.seed, j, path);
                    x = query.points[j];
                    double cost = 0.0;
                    for (std::size_t i = n; i < N; ++i) {
                        const double t = grid.node(i);
                        u.gradient(t, std::span<const double>(x).first(d), grad);
                        cost += h * running(td, t, x, grad.data(), d);
                        stream.fill_normal(eps);
                        if (under) {
                            sde::step::underdamped_forward_given(x, grad, eps, par, h);
                        } else {
                            sde::step::overdamped_forward_given(x, grad, eps, par, h);
                        }
                        sde::step::check_finite(x, grid.node(i + 1));
                    }
                    a.m.add(td.phi(x) + cost);
                }
            });
        });
    std::vector<WeightedEstimate> out;
    for (const auto& a : acc) {
        out.push_back(WeightedEstimate::from(a.m));
    }
    return out;
}

std::vector<std::vector<WeightedEstimate>> grad_value_overdamped(const HjbQuery& query)
{
    const std::size_t d = query.params.dim;
    const std::size_t n = validate(query, d);
    const auto& grid = query.grid;
    const std::size_t N = grid.n_steps();
    if (N - n < 2) {
        throw HorizonTooShort("gradient estimate needs at least two steps to the end of the grid");
    }
    const auto& u = *query.potential;
    const auto& par = query.params;
    const auto& td = query.terminal;
    const double h = grid.step();
    const double sqrt_h = std::sqrt(h);
    const double t0 = query.time;
    const double horizon = grid.t_end() - t0;
    const double a_inv = std::sqrt(par.beta / (2.0 * par.mu));
    const bool flat = u.is_zero();

    auto acc = sde::reduce_paths<VectorMoments>(
        query.points.size(), query.n_paths, query.workers,
        [&](std::size_t j, std::size_t first, std::size_t last, VectorMoments& a) {
            a.m.assign(d, {});
            at_point(j, query.points[j], [&] {
                std::vector<double> q(d), eps(d), grad(d), hess(d * d), m(d), r(d), sample(d);
                std::vector<double> x(d * d), tmp(d * d);
                const double baseline = query.centered_payoff ? td.phi(query.points[j]) : 0.0;
                for (std::size_t path = first; path < last; ++path) {
                    sde::RandomStream stream(query.seed, j, path);
                    q = query.points[j];
                    std::fill(m.begin(), m.end(), 0.0);
                    std::fill(r.begin(), r.end(), 0.0);
                    std::fill(x.begin(), x.end(), 0.0);
                    for (std::size_t i = 0; i < d; ++i) {
                        x[i * d + i] = 1.0;
                    }
                    double curvature = 0.0; // running sum of h U'' for d = 1
                    for (std::size_t i = n; i < N; ++i) {
                        const double t = grid.node(i);
                        u.gradient(t, q, grad);
                        if (i > n) {
                            const double w = h * running(td, t, q, grad.data(), d) / (t - t0);
                            for (std::size_t c = 0; c < d; ++c) {
                                r[c] += w * m[c];
                            }
                        }
                        stream.fill_normal(eps);
                        // m_c += sqrt(h) <eps, X e_c>
                        for (std::size_t c = 0; c < d; ++c) {
                            double s = 0.0;
                            for (std::size_t k = 0; k < d; ++k) {
                                s += eps[k] * x[k * d + c];
                            }
                            m[c] += sqrt_h * s;
                        }
                        if (!flat) {
                            u.hessian(t, q, hess);
                            if (d == 1) {
                                curvature += h * hess[0];
                                x[0] = std::exp(-par.mu * curvature);
                            } else {
                                for (std::size_t row = 0; row < d; ++row) {
                                    for (std::size_t b = 0; b < d; ++b) {
                                        double s = 0.0;
                                        for (std::size_t k = 0; k < d; ++k) {
                                            s += hess[row * d + k] * x[k * d + b];
                                        }
                                        tmp[row * d + b] = x[row * d + b] - par.mu * h * s;
                                    }
                                }
                                std::swap(x, tmp);
                            }
                        }
                        sde::step::overdamped_forward_given(q, grad, eps, par, h);
                        sde::step::check_finite(q, grid.node(i + 1));
                    }
                    const double phi = td.phi(q) - baseline;
                    for (std::size_t c = 0; c < d; ++c) {
                        a.m[c].add(a_inv * (phi * m[c] / horizon + r[c]));
                    }
                }
            });
        });
    std::vector<std::vector<WeightedEstimate>> out(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) {
        for (const auto& m : acc[j].m) {
            out[j].push_back(WeightedEstimate::from(m));
        }
    }
    return out;
}

std::vector<WeightedEstimate> grad_value_underdamped(const HjbQuery& query, std::span<const double> v,
                                                     GradientDirection direction)
{
    if (direction == GradientDirection::position) {
        throw Unsupported("position-direction gradients of the underdamped value function are not implemented");
    }
    if (query.kind != sde::DynamicsKind::underdamped_forward) {
        throw InvalidInput("underdamped gradient needs underdamped forward dynamics");
    }
    const std::size_t d = query.params.dim;
    const std::size_t n = validate(query, 2 * d);
    if (v.size() != d) {
        throw InvalidInput("gradient direction must have the momentum dimension");
    }
    const auto& grid = query.grid;
    const std::size_t N = grid.n_steps();
    if (N - n < 2) {
        throw HorizonTooShort("gradient estimate needs at least two steps to the end of the grid");
    }
    const auto& u = *query.potential;
    const auto& par = query.params;
    const auto& td = query.terminal;
    const double h = grid.step();
    const double sqrt_h = std::sqrt(h);
    const double t0 = query.time;
    const double tau = par.tau;
    const double kscale = tau / par.mass;
    const double prefactor = std::sqrt(tau * par.beta / (2.0 * par.mass));
    const bool flat = u.is_zero();

    // Sum_j <dW_j, h(t_j; t, s)> = -(A2 s^2 + A1 s + A0) / (tau s^2) with times
    // measured from t, so one pass serves every horizon s.
    auto weight = [tau](double a0, double a1, double a2, double s) {
        return -(a2 * s * s + a1 * s + a0) / (tau * s * s);
    };

    auto acc = sde::reduce_paths<Moments>(
        query.points.size(), query.n_paths, query.workers,
        [&](std::size_t j, std::size_t first, std::size_t last, Moments& a) {
            at_point(j, query.points[j], [&] {
                std::vector<double> x(2 * d), eps(d), grad(d), hess(d * d), hv(d);
                for (std::size_t path = first; path < last; ++path) {
                    sde::RandomStream stream(query.seed, j, path);
                    x = query.points[j];
                    double a0 = 0.0, a1 = 0.0, a2 = 0.0, r = 0.0;
                    for (std::size_t i = n; i < N; ++i) {
                        const double t = grid.node(i);
                        const double su = t - t0;
                        auto q = std::span<const double>(x).first(d);
                        u.gradient(t, q, grad);
                        if (i > n) {
                            r += h * running(td, t, x, grad.data(), d) * weight(a0, a1, a2, su);
                        }
                        stream.fill_normal(eps);
                        if (flat) {
                            std::fill(hv.begin(), hv.end(), 0.0);
                        } else {
                            u.hessian(t, q, hess);
                            for (std::size_t c = 0; c < d; ++c) {
                                double s = 0.0;
                                for (std::size_t k = 0; k < d; ++k) {
                                    s += hess[c * d + k] * v[k];
                                }
                                hv[c] = s;
                            }
                        }
                        // Kernel taken at the step midpoint; the left node leaves an O(h) bias.
                        const double sm = su + 0.5 * h;
                        double e_v = 0.0, e_k = 0.0;
                        for (std::size_t c = 0; c < d; ++c) {
                            e_v += eps[c] * v[c];
                            e_k += eps[c] * kscale * sm * hv[c];
                        }
                        e_v *= sqrt_h;
                        e_k *= sqrt_h;
                        a2 += e_v + e_k;
                        a1 += (-4.0 * sm - 4.0 * tau) * e_v - 2.0 * sm * e_k;
                        a0 += (3.0 * sm * sm + 6.0 * tau * sm) * e_v + sm * sm * e_k;
                        sde::step::underdamped_forward_given(x, grad, eps, par, h);
                        sde::step::check_finite(x, grid.node(i + 1));
                    }
                    const double w_end = weight(a0, a1, a2, grid.t_end() - t0);
                    a.m.add(prefactor * (td.phi(x) * w_end + r));
                }
            });
        });
    std::vector<WeightedEstimate> out;
    for (const auto& a : acc) {
        out.push_back(WeightedEstimate::from(a.m));
    }
    return out;
}

ScalarCocycle scalar_cocycle(const sde::Path& path, const sde::TimeGrid& grid, const sde::PotentialModel& potential,
                             double mu, std::size_t first)
{
    if (path.state_dim != 1) {
        throw InvalidInput("scalar cocycle needs a one dimensional overdamped path");
    }
    const double h = grid.step();
    double sum = 0.0;
    double prod = 1.0;
    double hess = 0.0;
    for (std::size_t i = first; i < grid.n_steps(); ++i) {
        potential.hessian(grid.node(i), path.state(i), std::span<double>(&hess, 1));
        sum += h * hess;
        prod *= 1.0 - mu * h * hess;
    }
    return {std::exp(-mu * sum), prod};
}

} // namespace stochctl::bel
