#pragma once

#include "stochctl/sde/potential.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace stochctl::bridge {

/// Regression data for the drift network: rows (t_i, q_i) -> target_i, q and
/// target stored row-major with `dim` columns.
struct TrainingBatch {
    TrainingBatch() = default;
    explicit TrainingBatch(std::size_t d) : dim(d) {}

    std::size_t dim = 1;
    std::vector<double> t;
    std::vector<double> q;
    std::vector<double> target;

    std::size_t size() const { return t.size(); }
    void add(double time, std::span<const double> state, std::span<const double> value);
};

/// Fully connected network (t, q) -> R^d with swish between layers and a linear
/// output. Parameters are stored layer by layer, each as W (row-major, out x in)
/// followed by b.
class DriftNetwork {
public:
    /// All-zero parameters.
    explicit DriftNetwork(std::size_t dim = 1, std::vector<std::size_t> hidden = {4, 10});
    /// Glorot normal inner layers, Glorot uniform output layer, zero biases.
    static DriftNetwork glorot(std::size_t dim, std::uint64_t seed, std::vector<std::size_t> hidden = {4, 10});

    std::size_t dim() const { return dim_; }
    const std::vector<std::size_t>& widths() const { return widths_; }
    std::size_t n_params() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    void forward(double t, std::span<const double> q, std::span<double> out) const;
    /// Output and its Jacobian in q (row-major d x d, row = output component).
    void forward_with_jacobian(double t, std::span<const double> q, std::span<double> out,
                               std::span<double> jacobian) const;

    /// Mean squared error over all rows and components.
    double loss(const TrainingBatch& batch) const;
    /// Same loss; grad receives its gradient in the parameters (reverse mode).
    double loss_and_gradient(const TrainingBatch& batch, std::span<double> grad) const;

private:
    std::size_t offset(std::size_t layer) const { return offsets_[layer]; }

    std::size_t dim_;
    std::vector<std::size_t> widths_; // input, hidden..., output
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

/// The network read as a potential gradient. Potential values are not available.
class NetworkDrift final : public sde::PotentialModel {
public:
    explicit NetworkDrift(std::shared_ptr<const DriftNetwork> net) : net_(std::move(net)) {}

    std::size_t dim() const override { return net_->dim(); }
    void gradient(double t, std::span<const double> q, std::span<double> out) const override;
    void hessian(double t, std::span<const double> q, std::span<double> out) const override;

    const DriftNetwork& network() const { return *net_; }

private:
    std::shared_ptr<const DriftNetwork> net_;
};

enum class OptimizerKind { sgd, adam };

/// Plain gradient descent or Adam (0.9, 0.999, 1e-8).
class Optimizer {
public:
    Optimizer(OptimizerKind kind, std::size_t n_params);

    void step(std::span<double> params, std::span<const double> grad, double rate);

    OptimizerKind kind() const { return kind_; }
    std::uint64_t steps() const { return t_; }
    const std::vector<double>& first_moment() const { return m_; }
    const std::vector<double>& second_moment() const { return v_; }
    void restore(std::uint64_t steps, std::vector<double> m, std::vector<double> v);

private:
    OptimizerKind kind_;
    std::uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

} // namespace stochctl::bridge
