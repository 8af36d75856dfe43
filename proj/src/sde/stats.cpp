#include "stochctl/sde/stats.hpp"

#include "stochctl/errors.hpp"

namespace stochctl::sde {

void RunningMoments::add(double x)
{
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void RunningMoments::merge(const RunningMoments& o)
{
    if (o.n == 0) {
        return;
    }
    if (n == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double total = na + nb;
    const double delta = o.mean - mean;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    n += o.n;
}

double RunningMoments::std_error() const
{
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

void LogMoments::add(double log_value)
{
    if (log_value > log_scale) {
        if (n > 0 && std::isfinite(log_scale)) {
            const double r = std::exp(log_scale - log_value);
            mean *= r;
            m2 *= r * r;
        }
        log_scale = log_value;
    }
    ++n;
    const double x = std::isfinite(log_scale) ? std::exp(log_value - log_scale) : 0.0;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void LogMoments::merge(const LogMoments& o)
{
    if (o.n == 0) {
        return;
    }
    if (n == 0) {
        *this = o;
        return;
    }
    LogMoments a = *this;
    LogMoments b = o;
    const double m = std::max(a.log_scale, b.log_scale);
    if (std::isfinite(m)) {
        for (LogMoments* s : {&a, &b}) {
            const double r = std::isfinite(s->log_scale) ? std::exp(s->log_scale - m) : 0.0;
            s->mean *= r;
            s->m2 *= r * r;
            s->log_scale = m;
        }
    }
    RunningMoments ra{a.n, a.mean, a.m2};
    ra.merge(RunningMoments{b.n, b.mean, b.m2});
    n = ra.n;
    mean = ra.mean;
    m2 = ra.m2;
    log_scale = m;
}

double LogMoments::value() const
{
    if (n == 0) {
        throw EmptyEnsemble("no samples");
    }
    if (!std::isfinite(log_scale) || mean == 0.0) {
        if (log_scale == std::numeric_limits<double>::infinity()) {
            throw DegenerateWeight("weight overflow");
        }
        return 0.0;
    }
    const double v = mean * std::exp(log_scale);
    if (!std::isfinite(v) || v == 0.0) {
        throw DegenerateWeight("weights cannot be represented after rescaling (log scale " +
                               std::to_string(log_scale) + ")");
    }
    return v;
}

double LogMoments::std_error() const
{
    if (n < 2 || !std::isfinite(log_scale)) {
        return 0.0;
    }
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) * std::exp(log_scale);
}

double LogMoments::log_value() const
{
    if (n == 0 || mean == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return log_scale + std::log(mean);
}

WeightedEstimate WeightedEstimate::from(const RunningMoments& m)
{
    WeightedEstimate e;
    e.mean = m.mean;
    e.std_error = m.std_error();
    e.n_samples = m.n;
    return e;
}

} // namespace stochctl::sde
