#include "fuzzmon/split.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "fuzzmon/random.hpp"

namespace fuzzmon {

SplitResult split(const std::vector<RawRecord>& records, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (records.empty()) throw std::invalid_argument("cannot split an empty record set");

  // Episodes in first-appearance order, so the shuffle input is independent
  // of episode id values.
  std::vector<std::vector<std::size_t>> episodes;
  std::map<std::int64_t, std::size_t> slot;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = slot.emplace(records[i].episode, episodes.size());
    if (inserted) episodes.emplace_back();
    episodes[it->second].push_back(i);
  }

  Rng rng(seed);
  rng.shuffle(episodes.begin(), episodes.end());

  const auto target = static_cast<std::size_t>(std::floor(static_cast<double>(records.size()) * train_fraction + 1e-9));
  SplitResult out;
  for (const auto& ep : episodes) {
    auto& side = out.train.size() + ep.size() <= target ? out.train : out.validation;
    for (auto idx : ep) side.push_back(records[idx]);
  }
  return out;
}

}  // namespace fuzzmon
