#pragma once

#include <Eigen/Core>

namespace tropskel {

// Lawson-Hanson active-set solution of min |A x - b| subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 500);

}  // namespace tropskel
