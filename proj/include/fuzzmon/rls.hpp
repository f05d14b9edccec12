#pragma once

#include <Eigen/Core>

namespace fuzzmon {

// Fuzzily weighted recursive least squares step for one rule consequent.
//   C <- C - w C x x^T C / (1 + w x^T C x)
//   a <- a + w C x (target - x^T a)
// x is the extended input [1, o]. weight in [0, 1]; weight 0 is a no-op.
void update_consequent(Eigen::VectorXd& consequent, Eigen::MatrixXd& covariance,
                       const Eigen::VectorXd& extended_input, double weight, double target);

// [1, o]
Eigen::VectorXd extend_input(const Eigen::VectorXd& o);

}  // namespace fuzzmon
