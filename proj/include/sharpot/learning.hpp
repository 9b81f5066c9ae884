#pragma once

#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sharpot/barycenter.hpp"
#include "sharpot/types.hpp"

namespace sharpot {

/// Gaussian kernel exp(-||x - x'||^2 / sigma), sigma > 0.
double gaussian_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       double sigma);

/// Supervised examples: inputs are rows of an l x d matrix, outputs are
/// interior histograms of a common length.
struct TrainingSet {
  Eigen::MatrixXd inputs;
  std::vector<InteriorHistogram> outputs;

  void validate() const;
  Eigen::Index count() const { return inputs.rows(); }
};

/// Kernel-ridge scoring state: bandwidth, ridge parameter, the training
/// inputs, and a Cholesky factorization of K + gamma*l*I so that score
/// queries are a single back-substitution.
class WeightModel {
 public:
  WeightModel(double sigma, double gamma, Eigen::MatrixXd inputs);

  double sigma() const { return sigma_; }
  double gamma() const { return gamma_; }
  Eigen::Index count() const { return inputs_.rows(); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }

  /// Lower-triangular Cholesky factor of K + gamma*l*I.
  const Eigen::MatrixXd& factor() const { return factor_; }

  /// Kernel evaluation vector (K_x)_i = k(x, x_i).
  Eigen::VectorXd evaluation_vector(const Eigen::VectorXd& x) const;

  /// Two triangular back-substitutions against the stored factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Rebuilds a model from a stored factor without refactorizing.
  static WeightModel from_factor(double sigma, double gamma,
                                 Eigen::MatrixXd inputs, Eigen::MatrixXd factor);

 private:
  WeightModel() = default;

  double sigma_ = 0.0;
  double gamma_ = 0.0;
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd factor_;
};

/// Fits the kernel-ridge score model: factorizes K + gamma*l*I.
WeightModel fit(const TrainingSet& train, double sigma, double gamma);

/// Score vector alpha(x) = (K + gamma*l*I)^{-1} K_x. Entries may be negative.
Eigen::VectorXd scores(const WeightModel& model, const Eigen::VectorXd& x);

struct Prediction {
  InteriorHistogram histogram;
  bool stalled = false;  // optimizer stalled; histogram is the best iterate
};

/// Histogram-valued prediction: minimizes sum_i alpha_i(x) S(y, y_i) over the
/// interior simplex by the relaxed signed-weight barycenter descent.
/// Initialized at the score-weighted average of the training outputs
/// projected to the interior simplex (uniform when all scores are <= 0).
Prediction predict(const WeightModel& model, const Eigen::VectorXd& x,
                   const std::vector<InteriorHistogram>& outputs, Metric metric,
                   double lambda, const CostMatrix& M, const DescentConfig& cfg);

/// K-fold grid search minimizing the mean held-out sharp Sinkhorn loss.
/// Fold assignment is a deterministic function of the seed; ties keep the
/// first grid entry (sigma-major order).
std::pair<double, double> cross_validate(const TrainingSet& train,
                                         const std::vector<double>& sigma_grid,
                                         const std::vector<double>& gamma_grid,
                                         int folds, Metric metric, double lambda,
                                         const CostMatrix& M,
                                         const DescentConfig& cfg,
                                         std::uint64_t seed);

}  // namespace sharpot
