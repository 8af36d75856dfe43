#pragma once

#include <cstddef>
#include <functional>

namespace stochctl::sde {

/// Runs body(i) for i in [0, n) on up to `workers` threads. Items are claimed
/// dynamically. Callers write results into slot i so the outcome does not
/// depend on scheduling. An exception is rethrown after all
/// workers have stopped; when several items fail, the lowest index wins.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

/// Paths per work item. Fixed so chunking, and thus merge order, never depends
/// on the worker count.
inline constexpr std::size_t path_chunk = 256;

} // namespace stochctl::sde

#include <vector>

namespace stochctl::sde {

/// Runs chunk(point, first_path, last_path, acc) over fixed-size path chunks of
/// every point, then merges each point's chunks in chunk order. The result is
/// bit-identical for any worker count.
template <class Acc, class Chunk>
std::vector<Acc> reduce_paths(std::size_t n_points, std::size_t n_paths, std::size_t workers, Chunk&& chunk)
{
    const std::size_t chunks = (n_paths + path_chunk - 1) / path_chunk;
    std::vector<Acc> parts(n_points * chunks);
    parallel_for(parts.size(), workers, [&](std::size_t item) {
        const std::size_t point = item / chunks;
        const std::size_t c = item % chunks;
        const std::size_t first = c * path_chunk;
        const std::size_t last = first + path_chunk < n_paths ? first + path_chunk : n_paths;
        chunk(point, first, last, parts[item]);
    });
    std::vector<Acc> out(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
        for (std::size_t c = 0; c < chunks; ++c) {
            out[p].merge(parts[p * chunks + c]);
        }
    }
    return out;
}

} // namespace stochctl::sde
