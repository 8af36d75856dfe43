#pragma once

#include "stochctl/sde/interpolation.hpp"
#include "stochctl/sde/params.hpp"
#include "stochctl/sde/time_grid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stochctl::bridge {

enum class HeatDirection {
    forward,  // initial data at t_start carried to later times
    backward, // terminal data at t_end carried to earlier times
};

/// Function sampled on a uniform spatial axis.
struct GridFunction {
    sde::UniformAxis axis;
    std::vector<double> values;
};

/// Solution of the heat equation with diffusivity mu / beta on selected time slices.
struct HeatField {
    sde::TimeGrid grid;
    sde::UniformAxis axis;
    std::vector<std::size_t> slices;
    std::vector<std::vector<double>> values;    // values[i] on slice slices[i]
    std::vector<std::vector<double>> std_error; // per point

    const std::vector<double>& at(std::size_t slice) const;
    const std::vector<double>& error_at(std::size_t slice) const;
};

/// Monte Carlo heat solve: each value is the mean of the (monotone cubic,
/// clamped) boundary data over Gaussian displacements of variance 2 mu s / beta,
/// s the elapsed heat time. The displacements of a slice are shared by all
/// spatial points and stratified in probability: z_i = Phi^{-1}((i + U_i) / n).
/// Slice k, sample i draws U_i from RandomStream(seed, k, i). An empty slice
/// list means every node of the grid.
HeatField heat_mc_solve(HeatDirection direction, const GridFunction& boundary, const sde::TimeGrid& grid,
                        const sde::PhysicalParams& params, std::size_t n_paths, std::uint64_t seed,
                        std::span<const std::size_t> slices = {}, std::size_t workers = 1);

} // namespace stochctl::bridge
