#pragma once

#include <cstdint>
#include <vector>

#include "fuzzmon/record.hpp"

namespace fuzzmon {

struct SplitResult {
  std::vector<RawRecord> train;
  std::vector<RawRecord> validation;
};

// Shuffles whole episodes with the seed and fills the training side up to
// floor(n * train_fraction) frames; episodes never straddle the two sides.
// Sizes are exact when every episode has one frame. Frames keep their
// in-episode order.
SplitResult split(const std::vector<RawRecord>& records, double train_fraction, std::uint64_t seed);

}  // namespace fuzzmon
