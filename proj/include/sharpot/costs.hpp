#pragma once

#include <vector>

#include <Eigen/Core>

#include "sharpot/types.hpp"

namespace sharpot {

/// Ground-cost matrix M_ij = ||x_i - y_j||^p for Euclidean points, p >= 1.
CostMatrix cost_from_points(const std::vector<Eigen::VectorXd>& xs,
                            const std::vector<Eigen::VectorXd>& ys, double p);

/// Entropy h(T) = -sum T_ij (log T_ij - 1) with the 0 log 0 = 0 convention.
/// Equals 1 + Shannon entropy for couplings of total mass one.
double entropy(const TransportPlan& plan);

/// Same on a raw nonnegative matrix.
double entropy(const Eigen::MatrixXd& entries);

}  // namespace sharpot
