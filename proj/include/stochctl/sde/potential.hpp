#pragma once

#include "stochctl/sde/interpolation.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace stochctl::sde {

/// Time dependent potential U_t(q) on R^d.
class PotentialModel {
public:
    virtual ~PotentialModel() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(double t, std::span<const double> q) const;
    virtual void gradient(double t, std::span<const double> q, std::span<double> out) const = 0;
    /// Row-major d x d.
    virtual void hessian(double t, std::span<const double> q, std::span<double> out) const;
    virtual double time_derivative(double t, std::span<const double> q) const;

    /// True only when the gradient is identically zero.
    virtual bool is_zero() const { return false; }
};

class ZeroPotential final : public PotentialModel {
public:
    explicit ZeroPotential(std::size_t dim = 1) : dim_(dim) {}

    std::size_t dim() const override { return dim_; }
    double value(double, std::span<const double>) const override { return 0.0; }
    void gradient(double, std::span<const double>, std::span<double> out) const override;
    void hessian(double, std::span<const double>, std::span<double> out) const override;
    double time_derivative(double, std::span<const double>) const override { return 0.0; }
    bool is_zero() const override { return true; }

private:
    std::size_t dim_;
};

/// U_t(q) = q.S_t q / 2 with S_t symmetric, row-major.
class QuadraticMatrix final : public PotentialModel {
public:
    using MatrixFn = std::function<std::vector<double>(double)>;

    QuadraticMatrix(std::size_t dim, std::vector<double> stiffness);
    /// rate is dS/dt; when empty it is taken by central differences of stiffness.
    QuadraticMatrix(std::size_t dim, MatrixFn stiffness, MatrixFn rate = {});

    std::size_t dim() const override { return dim_; }
    double value(double t, std::span<const double> q) const override;
    void gradient(double t, std::span<const double> q, std::span<double> out) const override;
    void hessian(double t, std::span<const double> q, std::span<double> out) const override;
    double time_derivative(double t, std::span<const double> q) const override;

    std::vector<double> stiffness(double t) const;

private:
    std::size_t dim_;
    MatrixFn stiffness_;
    MatrixFn rate_;
    bool constant_ = false;
    std::vector<double> fixed_;
};

/// Separable potentials sum_i f(q_i).
class SeparablePotential : public PotentialModel {
public:
    explicit SeparablePotential(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const override { return dim_; }
    double value(double t, std::span<const double> q) const override;
    void gradient(double t, std::span<const double> q, std::span<double> out) const override;
    void hessian(double t, std::span<const double> q, std::span<double> out) const override;
    double time_derivative(double, std::span<const double>) const override { return 0.0; }

protected:
    virtual double f(double x) const = 0;
    virtual double df(double x) const = 0;
    virtual double d2f(double x) const = 0;

private:
    std::size_t dim_;
};

/// (q - 1)^4 / 4
class QuarticShift final : public SeparablePotential {
public:
    explicit QuarticShift(std::size_t dim = 1) : SeparablePotential(dim) {}

protected:
    double f(double x) const override;
    double df(double x) const override;
    double d2f(double x) const override;
};

/// (q^2 - 1)^2 / 4
class DoubleWell final : public SeparablePotential {
public:
    explicit DoubleWell(std::size_t dim = 1) : SeparablePotential(dim) {}

protected:
    double f(double x) const override;
    double df(double x) const override;
    double d2f(double x) const override;
};

/// q^4 / 2, so that the drift gradient is 2 q^3.
class MonomialGrad final : public SeparablePotential {
public:
    explicit MonomialGrad(std::size_t dim = 1) : SeparablePotential(dim) {}

protected:
    double f(double x) const override;
    double df(double x) const override;
    double d2f(double x) const override;
};

/// One dimensional drift tabulated on (time grid) x (uniform spatial axis).
/// Linear in time between slices, monotone cubic in space, clamped outside.
class TabulatedDrift final : public PotentialModel {
public:
    /// gradient[k] and (optionally) value[k] hold slice k on the axis.
    TabulatedDrift(TimeGrid times, UniformAxis axis, std::vector<std::vector<double>> gradient,
                   std::vector<std::vector<double>> value = {});

    std::size_t dim() const override { return 1; }
    double value(double t, std::span<const double> q) const override;
    void gradient(double t, std::span<const double> q, std::span<double> out) const override;
    void hessian(double t, std::span<const double> q, std::span<double> out) const override;
    double time_derivative(double t, std::span<const double> q) const override;

    const TimeGrid& times() const { return times_; }
    const UniformAxis& axis() const { return axis_; }
    bool has_value() const { return !value_.empty(); }
    /// Raw table rows.
    const std::vector<double>& gradient_slice(std::size_t k) const { return gradient_[k].values(); }
    const std::vector<double>& value_slice(std::size_t k) const { return value_[k].values(); }

private:
    void locate(double t, std::size_t& k, double& w) const;

    TimeGrid times_;
    UniformAxis axis_;
    std::vector<MonotoneCubic> gradient_;
    std::vector<MonotoneCubic> value_;
};

std::size_t check_dim(const PotentialModel& u, std::size_t expected);

} // namespace stochctl::sde
