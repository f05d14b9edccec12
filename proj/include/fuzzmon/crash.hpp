#pragma once

#include <cstddef>
#include <vector>

#include "fuzzmon/scenario.hpp"

namespace fuzzmon {

// Frame indices at which a run of consecutive misses reaches k_track + k_crash.
// The run counter restarts after each crash. Throws std::invalid_argument for k < 1.
std::vector<std::size_t> detect_crashes(const std::vector<bool>& misses, int k_track = 9, int k_crash = 5);

// Misses are frames with hmp set.
std::vector<std::size_t> detect_crashes(const Episode& episode, int k_track = 9, int k_crash = 5);

}  // namespace fuzzmon
