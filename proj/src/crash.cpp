#include "fuzzmon/crash.hpp"

#include <stdexcept>

namespace fuzzmon {

std::vector<std::size_t> detect_crashes(const std::vector<bool>& misses, int k_track, int k_crash) {
  if (k_track < 1 || k_crash < 1) throw std::invalid_argument("tracker constants must be >= 1");
  const std::size_t limit = static_cast<std::size_t>(k_track) + static_cast<std::size_t>(k_crash);
  std::vector<std::size_t> crashes;
  std::size_t run = 0;
  for (std::size_t i = 0; i < misses.size(); ++i) {
    run = misses[i] ? run + 1 : 0;
    if (run == limit) {
      crashes.push_back(i);
      run = 0;
    }
  }
  return crashes;
}

std::vector<std::size_t> detect_crashes(const Episode& episode, int k_track, int k_crash) {
  std::vector<bool> misses;
  misses.reserve(episode.frames.size());
  for (const auto& f : episode.frames) misses.push_back(f.record.hmp);
  return detect_crashes(misses, k_track, k_crash);
}

}  // namespace fuzzmon
