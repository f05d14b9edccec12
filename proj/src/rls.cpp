#include "fuzzmon/rls.hpp"

#include <stdexcept>

namespace fuzzmon {

Eigen::VectorXd extend_input(const Eigen::VectorXd& o) {
  Eigen::VectorXd x(o.size() + 1);
  x[0] = 1.0;
  x.tail(o.size()) = o;
  return x;
}

void update_consequent(Eigen::VectorXd& consequent, Eigen::MatrixXd& covariance,
                       const Eigen::VectorXd& extended_input, double weight, double target) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("RLS weight must lie in [0, 1]");
  if (weight == 0.0) return;
  const Eigen::VectorXd cx = covariance * extended_input;
  // x^T C x >= 0 for C positive definite, so the denominator stays >= 1.
  const double denom = 1.0 + weight * extended_input.dot(cx);
  covariance.noalias() -= (weight / denom) * cx * cx.transpose();
  // Keep C exactly symmetric; the rank-one update can drift by rounding.
  covariance = 0.5 * (covariance + covariance.transpose()).eval();
  const double error = target - extended_input.dot(consequent);
  consequent += weight * (covariance * extended_input) * error;
}

}  // namespace fuzzmon
