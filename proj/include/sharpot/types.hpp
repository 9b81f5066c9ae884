#pragma once

#include <Eigen/Core>

namespace sharpot {

/// A point on the probability simplex: nonnegative weights summing to one
/// within an absolute tolerance of 1e-12. Construction validates; inputs
/// violating the invariants are rejected, never silently renormalized.
class Histogram {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit Histogram(Eigen::VectorXd weights);

  static Histogram uniform(Eigen::Index n);

  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }
  double operator[](Eigen::Index i) const { return weights_[i]; }

 private:
  Eigen::VectorXd weights_;
};

/// A histogram with every coordinate at least epsilon, epsilon in (0, 1/n).
/// This is the domain on which the Sinkhorn distances are differentiable.
class InteriorHistogram {
 public:
  InteriorHistogram(Histogram histogram, double epsilon);

  /// Wraps a strictly positive histogram, choosing epsilon = min(p)/2.
  static InteriorHistogram from_positive(const Histogram& p);

  const Histogram& histogram() const { return histogram_; }
  const Eigen::VectorXd& weights() const { return histogram_.weights(); }
  Eigen::Index size() const { return histogram_.size(); }
  double epsilon() const { return epsilon_; }

 private:
  Histogram histogram_;
  double epsilon_;
};

/// Nonnegative finite ground-cost matrix, entry (i, j) being the cost of
/// moving one unit of mass from source bin i to target bin j.
class CostMatrix {
 public:
  explicit CostMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& entries() const { return entries_; }
  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// A nonnegative coupling whose marginals match the prescribed histograms up
/// to the feasibility tolerance attached at construction.
class TransportPlan {
 public:
  TransportPlan(Eigen::MatrixXd entries, Histogram row_marginal,
                Histogram col_marginal, double feasibility_tol);

  const Eigen::MatrixXd& entries() const { return entries_; }
  const Histogram& row_marginal() const { return row_marginal_; }
  const Histogram& col_marginal() const { return col_marginal_; }
  double feasibility_tol() const { return feasibility_tol_; }

  /// L1 violation of both marginal constraints.
  double marginal_residual() const;

 private:
  Eigen::MatrixXd entries_;
  Histogram row_marginal_;
  Histogram col_marginal_;
  double feasibility_tol_;
};

/// Element of the tangent space to the simplex: components sum to zero
/// within 1e-10.
class TangentVector {
 public:
  static constexpr double kSumTolerance = 1e-10;

  explicit TangentVector(Eigen::VectorXd components);

  const Eigen::VectorXd& components() const { return components_; }
  Eigen::Index size() const { return components_.size(); }
  double operator[](Eigen::Index i) const { return components_[i]; }

 private:
  Eigen::VectorXd components_;
};

/// L1 distance of a coupling from the transportation polytope of (a, b).
double marginal_violation(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b);

/// Orthogonal projection onto {x : sum(x) = 0}; subtracts the mean.
TangentVector tangent_project(const Eigen::VectorXd& v);

}  // namespace sharpot
