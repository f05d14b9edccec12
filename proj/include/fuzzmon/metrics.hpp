#pragma once

#include <cstdint>
#include <vector>

namespace fuzzmon {

// Safety return: 0 when an error goes unflagged (tau = 1, m = 0), else 1.
int safety_return(int tau, int m);
// Mission return: 0 when a correct output is flagged (tau = 0, m = 1), else 1.
int mission_return(int tau, int m);

struct Confusion {
  std::uint64_t tp = 0;  // tau = 1, m = 1
  std::uint64_t fn = 0;  // tau = 1, m = 0
  std::uint64_t fp = 0;  // tau = 0, m = 1
  std::uint64_t tn = 0;
  std::uint64_t n() const { return tp + fn + fp + tn; }
  bool operator==(const Confusion&) const = default;
};

// Metric numerators are integer sums of return differences; the doubles are
// the numerators divided by n.
struct MonitorMetrics {
  std::uint64_t n = 0;
  std::int64_t sg_sum = 0;
  std::int64_t rh_sum = 0;
  std::int64_t ac_sum = 0;
  std::uint64_t positives = 0;
  double sg = 0.0;
  double rh = 0.0;
  double ac = 0.0;
  double base_rate = 0.0;
  Confusion confusion;
};

// SG against the unmonitored reference (m = 0), RH against the ideal
// reference (m = tau), AC against the unmonitored mission return.
// Throws std::invalid_argument for empty or mismatched inputs and non-binary values.
MonitorMetrics evaluate_predictions(const std::vector<int>& tau, const std::vector<int>& m);

}  // namespace fuzzmon
