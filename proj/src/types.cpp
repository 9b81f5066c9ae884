#include "sharpot/types.hpp"

#include <cmath>
#include <sstream>

#include "sharpot/errors.hpp"

namespace sharpot {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string(what) + ": entries must be finite");
  }
}

}  // namespace

Histogram::Histogram(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw InvalidInput("Histogram: empty weight vector");
  }
  require_finite(weights_, "Histogram");
  if ((weights_.array() < 0.0).any()) {
    throw InvalidInput("Histogram: negative entry");
  }
  const double sum = weights_.sum();
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg << "Histogram: weights sum to " << sum << ", expected 1 within "
        << kSumTolerance;
    throw InvalidInput(msg.str());
  }
}

Histogram Histogram::uniform(Eigen::Index n) {
  if (n <= 0) {
    throw InvalidInput("Histogram::uniform: n must be positive");
  }
  return Histogram(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

InteriorHistogram::InteriorHistogram(Histogram histogram, double epsilon)
    : histogram_(std::move(histogram)), epsilon_(epsilon) {
  const double n = static_cast<double>(histogram_.size());
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / n)) {
    throw InvalidInput("InteriorHistogram: epsilon must lie in (0, 1/n)");
  }
  if ((histogram_.weights().array() < epsilon).any()) {
    throw InvalidInput("InteriorHistogram: entry below the interior floor");
  }
}

InteriorHistogram InteriorHistogram::from_positive(const Histogram& p) {
  const double lo = p.weights().minCoeff();
  if (!(lo > 0.0)) {
    throw InvalidInput("InteriorHistogram::from_positive: zero entry");
  }
  return InteriorHistogram(p, lo / 2.0);
}

CostMatrix::CostMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0) {
    throw InvalidInput("CostMatrix: empty matrix");
  }
  if (!entries_.allFinite()) {
    throw InvalidInput("CostMatrix: entries must be finite");
  }
  if ((entries_.array() < 0.0).any()) {
    throw InvalidInput("CostMatrix: negative cost");
  }
}

double marginal_violation(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
  const double row = (plan.rowwise().sum() - a).lpNorm<1>();
  const double col = (plan.colwise().sum().transpose() - b).lpNorm<1>();
  return row + col;
}

TransportPlan::TransportPlan(Eigen::MatrixXd entries, Histogram row_marginal,
                             Histogram col_marginal, double feasibility_tol)
    : entries_(std::move(entries)),
      row_marginal_(std::move(row_marginal)),
      col_marginal_(std::move(col_marginal)),
      feasibility_tol_(feasibility_tol) {
  if (entries_.rows() != row_marginal_.size() ||
      entries_.cols() != col_marginal_.size()) {
    throw InvalidInput("TransportPlan: marginal dimensions do not match plan");
  }
  if (!entries_.allFinite() || (entries_.array() < 0.0).any()) {
    throw InvalidInput("TransportPlan: entries must be finite and nonnegative");
  }
  if (!(feasibility_tol_ > 0.0)) {
    throw InvalidInput("TransportPlan: feasibility tolerance must be positive");
  }
  if (marginal_residual() > feasibility_tol_) {
    std::ostringstream msg;
    msg << "TransportPlan: marginal violation " << marginal_residual()
        << " exceeds tolerance " << feasibility_tol_;
    throw InvalidInput(msg.str());
  }
}

double TransportPlan::marginal_residual() const {
  return marginal_violation(entries_, row_marginal_.weights(),
                            col_marginal_.weights());
}

TangentVector::TangentVector(Eigen::VectorXd components)
    : components_(std::move(components)) {
  if (components_.size() == 0) {
    throw InvalidInput("TangentVector: empty");
  }
  require_finite(components_, "TangentVector");
  if (std::abs(components_.sum()) > kSumTolerance) {
    throw InvalidInput("TangentVector: components must sum to zero");
  }
}

TangentVector tangent_project(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  Eigen::VectorXd out = v.array() - mean;
  // Guard the invariant against rounding on large vectors.
  out[0] -= out.sum();
  return TangentVector(std::move(out));
}

}  // namespace sharpot
