#pragma once

#include "stochctl/bridge/trainer.hpp"

#include <filesystem>
#include <string>

namespace stochctl::bridge {

inline constexpr int checkpoint_version = 1;

/// JSON text; doubles are written as hexadecimal floats so reading restores
/// every bit.
std::string checkpoint_to_string(const TrainState& state, std::uint64_t seed);
TrainState checkpoint_from_string(const std::string& text, std::uint64_t* seed = nullptr);

void save_checkpoint(const std::filesystem::path& path, const TrainState& state, std::uint64_t seed);
TrainState load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed = nullptr);

} // namespace stochctl::bridge
