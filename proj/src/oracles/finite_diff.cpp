#include "stochctl/oracles/finite_diff.hpp"

#include "stochctl/errors.hpp"

#include <cmath>

namespace stochctl::oracles {

std::vector<sde::WeightedEstimate> finite_diff_gradient(const EstimateFn& f, std::span<const double> x, double step)
{
    if (!(step > 0.0)) {
        throw InvalidInput("finite difference step must be positive");
    }
    std::vector<sde::WeightedEstimate> out(x.size());
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + step;
        const auto plus = f(y);
        y[i] = x[i] - step;
        const auto minus = f(y);
        y[i] = x[i];
        out[i].mean = (plus.mean - minus.mean) / (2.0 * step);
        out[i].std_error = std::hypot(plus.std_error, minus.std_error) / (2.0 * step);
        out[i].n_samples = plus.n_samples + minus.n_samples;
    }
    return out;
}

} // namespace stochctl::oracles
