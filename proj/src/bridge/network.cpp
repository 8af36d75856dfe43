#include "stochctl/bridge/network.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/sde/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace stochctl::bridge {

namespace {

constexpr std::size_t max_width = 64;
constexpr std::size_t max_layers = 8;
constexpr std::size_t max_dim = 8;
using Buffer = std::array<double, max_width>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double swish(double x) { return x * sigmoid(x); }

inline double swish_slope(double x)
{
    const double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

} // namespace

void TrainingBatch::add(double time, std::span<const double> state, std::span<const double> value)
{
    if (state.size() != dim || value.size() != dim) {
        throw InvalidInput("training row has the wrong dimension");
    }
    t.push_back(time);
    q.insert(q.end(), state.begin(), state.end());
    target.insert(target.end(), value.begin(), value.end());
}

DriftNetwork::DriftNetwork(std::size_t dim, std::vector<std::size_t> hidden) : dim_(dim)
{
    if (dim == 0 || dim > max_dim) {
        throw InvalidInput("network dimension must lie in [1, 8]");
    }
    widths_.push_back(dim + 1);
    widths_.insert(widths_.end(), hidden.begin(), hidden.end());
    widths_.push_back(dim);
    if (widths_.size() > max_layers + 1) {
        throw InvalidInput("too many network layers");
    }
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        if (widths_[l + 1] == 0 || widths_[l + 1] > max_width || widths_[l] > max_width) {
            throw InvalidInput("network layer widths must lie in [1, 64]");
        }
        offsets_.push_back(n);
        n += widths_[l + 1] * widths_[l] + widths_[l + 1];
    }
    params_.assign(n, 0.0);
}

DriftNetwork DriftNetwork::glorot(std::size_t dim, std::uint64_t seed, std::vector<std::size_t> hidden)
{
    DriftNetwork net(dim, std::move(hidden));
    const std::size_t layers = net.widths_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = net.widths_[l];
        const std::size_t out = net.widths_[l + 1];
        const double fan = static_cast<double>(in + out);
        sde::RandomStream rs(seed, l, 0);
        double* w = net.params_.data() + net.offset(l);
        for (std::size_t i = 0; i < in * out; ++i) {
            if (l + 1 < layers) {
                w[i] = std::sqrt(2.0 / fan) * rs.normal();
            } else {
                w[i] = std::sqrt(6.0 / fan) * (2.0 * rs.uniform() - 1.0);
            }
        }
    }
    return net;
}

void DriftNetwork::forward(double t, std::span<const double> q, std::span<double> out) const
{
    Buffer a;
    Buffer z;
    a[0] = t;
    for (std::size_t i = 0; i < dim_; ++i) {
        a[i + 1] = q[i];
    }
    const std::size_t layers = widths_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = widths_[l];
        const std::size_t n = widths_[l + 1];
        const double* w = params_.data() + offset(l);
        const double* b = w + n * in;
        for (std::size_t r = 0; r < n; ++r) {
            double s = b[r];
            for (std::size_t c = 0; c < in; ++c) {
                s += w[r * in + c] * a[c];
            }
            z[r] = s;
        }
        if (l + 1 < layers) {
            for (std::size_t r = 0; r < n; ++r) {
                a[r] = swish(z[r]);
            }
        }
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = z[i];
    }
}

void DriftNetwork::forward_with_jacobian(double t, std::span<const double> q, std::span<double> out,
                                         std::span<double> jacobian) const
{
    // tangent[r * dim + j] = d a_r / d q_j
    std::array<double, max_width * max_dim> tangent;
    std::array<double, max_width * max_dim> next;
    Buffer a;
    Buffer z;
    a[0] = t;
    std::fill_n(tangent.begin(), (dim_ + 1) * dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        a[i + 1] = q[i];
        tangent[(i + 1) * dim_ + i] = 1.0;
    }
    const std::size_t layers = widths_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = widths_[l];
        const std::size_t n = widths_[l + 1];
        const double* w = params_.data() + offset(l);
        const double* b = w + n * in;
        for (std::size_t r = 0; r < n; ++r) {
            double s = b[r];
            for (std::size_t c = 0; c < in; ++c) {
                s += w[r * in + c] * a[c];
            }
            z[r] = s;
            for (std::size_t j = 0; j < dim_; ++j) {
                double g = 0.0;
                for (std::size_t c = 0; c < in; ++c) {
                    g += w[r * in + c] * tangent[c * dim_ + j];
                }
                next[r * dim_ + j] = g;
            }
        }
        if (l + 1 < layers) {
            for (std::size_t r = 0; r < n; ++r) {
                a[r] = swish(z[r]);
                const double slope = swish_slope(z[r]);
                for (std::size_t j = 0; j < dim_; ++j) {
                    tangent[r * dim_ + j] = slope * next[r * dim_ + j];
                }
            }
        }
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = z[i];
        for (std::size_t j = 0; j < dim_; ++j) {
            jacobian[i * dim_ + j] = next[i * dim_ + j];
        }
    }
}

double DriftNetwork::loss(const TrainingBatch& batch) const
{
    if (batch.size() == 0) {
        throw EmptyEnsemble("empty training batch");
    }
    Buffer out{};
    double s = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward(batch.t[i], std::span<const double>(batch.q).subspan(i * dim_, dim_), out);
        for (std::size_t c = 0; c < dim_; ++c) {
            const double r = out[c] - batch.target[i * dim_ + c];
            s += r * r;
        }
    }
    return s / static_cast<double>(batch.size() * dim_);
}

double DriftNetwork::loss_and_gradient(const TrainingBatch& batch, std::span<double> grad) const
{
    if (batch.size() == 0) {
        throw EmptyEnsemble("empty training batch");
    }
    if (batch.dim != dim_ || grad.size() != params_.size()) {
        throw InvalidInput("batch or gradient does not match the network");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t layers = widths_.size() - 1;
    const double norm = 1.0 / static_cast<double>(batch.size() * dim_);
    // acts[l] is the input of layer l; pre[l] its pre-activation output.
    std::array<Buffer, max_layers + 1> acts{};
    std::array<Buffer, max_layers> pre{};
    Buffer delta{};
    Buffer back{};
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        acts[0][0] = batch.t[i];
        for (std::size_t c = 0; c < dim_; ++c) {
            acts[0][c + 1] = batch.q[i * dim_ + c];
        }
        for (std::size_t l = 0; l < layers; ++l) {
            const std::size_t in = widths_[l];
            const std::size_t n = widths_[l + 1];
            const double* w = params_.data() + offset(l);
            const double* b = w + n * in;
            for (std::size_t r = 0; r < n; ++r) {
                double s = b[r];
                for (std::size_t c = 0; c < in; ++c) {
                    s += w[r * in + c] * acts[l][c];
                }
                pre[l][r] = s;
                acts[l + 1][r] = l + 1 < layers ? swish(s) : s;
            }
        }
        for (std::size_t c = 0; c < dim_; ++c) {
            const double r = pre[layers - 1][c] - batch.target[i * dim_ + c];
            total += r * r;
            delta[c] = 2.0 * r * norm;
        }
        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t in = widths_[l];
            const std::size_t n = widths_[l + 1];
            const double* w = params_.data() + offset(l);
            double* gw = grad.data() + offset(l);
            double* gb = gw + n * in;
            for (std::size_t r = 0; r < n; ++r) {
                gb[r] += delta[r];
                for (std::size_t c = 0; c < in; ++c) {
                    gw[r * in + c] += delta[r] * acts[l][c];
                }
            }
            if (l == 0) {
                break;
            }
            for (std::size_t c = 0; c < in; ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    s += w[r * in + c] * delta[r];
                }
                back[c] = s * swish_slope(pre[l - 1][c]);
            }
            delta = back;
        }
    }
    return total * norm;
}

void NetworkDrift::gradient(double t, std::span<const double> q, std::span<double> out) const
{
    net_->forward(t, q, out);
}

void NetworkDrift::hessian(double t, std::span<const double> q, std::span<double> out) const
{
    Buffer value{};
    net_->forward_with_jacobian(t, q, std::span<double>(value.data(), net_->dim()), out);
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t n_params) : kind_(kind), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Optimizer::step(std::span<double> params, std::span<const double> grad, double rate)
{
    if (params.size() != m_.size() || grad.size() != m_.size()) {
        throw InvalidInput("optimizer state does not match the parameters");
    }
    ++t_;
    if (kind_ == OptimizerKind::sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= rate * grad[i];
        }
        return;
    }
    constexpr double b1 = 0.9;
    constexpr double b2 = 0.999;
    constexpr double eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
        v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
        params[i] -= rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
    }
}

void Optimizer::restore(std::uint64_t steps, std::vector<double> m, std::vector<double> v)
{
    if (m.size() != m_.size() || v.size() != v_.size()) {
        throw InvalidInput("optimizer state does not match the parameters");
    }
    t_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
}

} // namespace stochctl::bridge
