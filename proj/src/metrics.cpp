#include "fuzzmon/metrics.hpp"

#include <stdexcept>

namespace fuzzmon {

namespace {

void require_binary(int v) {
  if (v != 0 && v != 1) throw std::invalid_argument("statuses and monitor outputs must be 0 or 1");
}

}  // namespace

int safety_return(int tau, int m) {
  require_binary(tau);
  require_binary(m);
  return (tau == 1 && m == 0) ? 0 : 1;
}

int mission_return(int tau, int m) {
  require_binary(tau);
  require_binary(m);
  return (tau == 0 && m == 1) ? 0 : 1;
}

MonitorMetrics evaluate_predictions(const std::vector<int>& tau, const std::vector<int>& m) {
  if (tau.empty()) throw std::invalid_argument("evaluation needs at least one record");
  if (tau.size() != m.size()) throw std::invalid_argument("status and prediction counts differ");
  MonitorMetrics out;
  out.n = tau.size();
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const int t = tau[i];
    const int p = m[i];
    const int rs_monitored = safety_return(t, p);
    out.sg_sum += rs_monitored - safety_return(t, 0);
    out.rh_sum += safety_return(t, t) - rs_monitored;
    out.ac_sum += mission_return(t, 0) - mission_return(t, p);
    out.positives += static_cast<std::uint64_t>(t);
    if (t == 1) {
      ++(p == 1 ? out.confusion.tp : out.confusion.fn);
    } else {
      ++(p == 1 ? out.confusion.fp : out.confusion.tn);
    }
  }
  const double n = static_cast<double>(out.n);
  out.sg = static_cast<double>(out.sg_sum) / n;
  out.rh = static_cast<double>(out.rh_sum) / n;
  out.ac = static_cast<double>(out.ac_sum) / n;
  out.base_rate = static_cast<double>(out.positives) / n;
  return out;
}

}  // namespace fuzzmon
