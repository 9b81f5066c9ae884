#include "sharpot/costs.hpp"

#include <cmath>

#include "sharpot/errors.hpp"

namespace sharpot {

CostMatrix cost_from_points(const std::vector<Eigen::VectorXd>& xs,
                            const std::vector<Eigen::VectorXd>& ys, double p) {
  if (xs.empty() || ys.empty()) {
    throw InvalidInput("cost_from_points: empty point list");
  }
  if (!(p >= 1.0)) {
    throw InvalidInput("cost_from_points: exponent p must be at least 1");
  }
  const Eigen::Index dim = xs.front().size();
  for (const auto& x : xs) {
    if (x.size() != dim || !x.allFinite()) {
      throw InvalidInput("cost_from_points: inconsistent or non-finite point");
    }
  }
  for (const auto& y : ys) {
    if (y.size() != dim || !y.allFinite()) {
      throw InvalidInput("cost_from_points: inconsistent or non-finite point");
    }
  }

  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()),
                    static_cast<Eigen::Index>(ys.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double sq = (xs[static_cast<size_t>(i)] - ys[static_cast<size_t>(j)])
                            .squaredNorm();
      if (p == 2.0) {
        m(i, j) = sq;
      } else if (p == 1.0) {
        m(i, j) = std::sqrt(sq);
      } else {
        m(i, j) = std::pow(std::sqrt(sq), p);
      }
    }
  }
  return CostMatrix(std::move(m));
}

double entropy(const Eigen::MatrixXd& entries) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < entries.cols(); ++j) {
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      const double t = entries(i, j);
      if (t > 0.0) {
        h -= t * (std::log(t) - 1.0);
      }
      // 0 log 0 = 0: zero entries contribute nothing.
    }
  }
  return h;
}

double entropy(const TransportPlan& plan) { return entropy(plan.entries()); }

}  // namespace sharpot
