#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sharpot/errors.hpp"
#include "sharpot/sinkhorn.hpp"
#include "sharpot/types.hpp"

namespace sharpot {

enum class Metric { Sharp, Regularized, Exact };

/// Fixed-support barycenter problem: minimize over mu in the simplex the
/// weighted sum of distances to the given measures. costs[i] has one row per
/// barycenter support point and one column per support point of measures[i].
/// In standard mode the weights are nonnegative and sum to one; relaxed mode
/// permits signed weights (used by the structured-prediction estimator).
struct BarycenterProblem {
  std::vector<Histogram> measures;
  std::vector<CostMatrix> costs;
  Eigen::VectorXd weights;
  Eigen::Index support_size;
  bool relaxed = false;

  void validate() const;
  Eigen::Index count() const { return static_cast<Eigen::Index>(measures.size()); }
};

/// Objective values per accepted step, the step sizes that produced them,
/// and termination diagnostics of a descent run.
struct SolverTrace {
  std::vector<double> objectives;
  std::vector<double> step_sizes;
  double final_grad_norm = 0.0;
  int iterations = 0;
};

/// Bregman projections did not reach a fixed point; carries the last
/// barycenter iterate.
class BarycenterNonConvergence : public NonConvergence {
 public:
  BarycenterNonConvergence(const std::string& what, double residual,
                           int iterations, Eigen::VectorXd last_iterate)
      : NonConvergence(what, residual, iterations),
        last_iterate_(std::move(last_iterate)) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

/// All line searches failed at the minimum step; carries the trace of the
/// run up to the stall.
class OptimizerStall : public Error {
 public:
  OptimizerStall(const std::string& what, SolverTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

/// Accelerated projected gradient descent over the interior simplex:
/// Nesterov momentum with restart on objective increase, backtracking line
/// search halving the step until sufficient decrease.
struct DescentConfig {
  int max_iter = 500;
  double grad_tol = 1e-6;
  double epsilon = 0.0;       // interior floor; 0 selects 1e-8 / n
  double initial_step = 0.0;  // 0 selects 1 / (lambda * max M)
  double min_step = 1e-14;
  double sufficient_decrease = 1e-4;
  double step_growth_cap = 8.0;  // step may grow back up to this multiple
  SinkhornConfig solver;         // inner solver; lambda is overwritten
};

/// Weighted sum of distances from mu to every measure of the problem.
/// The exact metric is available only at the oracle scale.
double barycenter_functional(const Histogram& mu, const BarycenterProblem& prob,
                             Metric metric, double lambda,
                             const SinkhornConfig* solver_cfg = nullptr);

/// Regularized-distance barycenter by iterative Bregman projections:
/// alternating scaling updates with the elementwise geometric-mean coupling
/// step a = prod_i (K_i v_i)^{w_i}, K_i = exp(-lambda M_i). Switches to
/// log-domain updates under the same policy as the Sinkhorn solver. Stops
/// when successive iterates differ by at most `tol` in L1; the final iterate
/// is normalized onto the simplex before it is returned.
Histogram regularized_barycenter_ibp(const BarycenterProblem& prob,
                                     double lambda, double tol = 1e-8,
                                     int max_iter = 10000);

/// Outcome of a barycenter descent that reports a stall instead of throwing.
struct DescentOutcome {
  Histogram best;
  SolverTrace trace;
  bool stalled;
};

/// Accelerated projected gradient descent on the weighted functional from
/// `init`, under either differentiable metric. Signed weights are honored in
/// relaxed mode; best-iterate semantics apply.
DescentOutcome barycenter_descent(const BarycenterProblem& prob, double lambda,
                                  const Histogram& init, const DescentConfig& cfg,
                                  Metric metric);

/// Sharp-distance barycenter by accelerated projected gradient descent from
/// `init`. Returns the best iterate by objective together with the trace;
/// throws OptimizerStall when no line search can make progress.
std::pair<Histogram, SolverTrace> sharp_barycenter_gd(
    const BarycenterProblem& prob, double lambda, const Histogram& init,
    const DescentConfig& cfg);

/// Same descent applied to the regularized distance (gradient alpha*).
std::pair<Histogram, SolverTrace> regularized_barycenter_gd(
    const BarycenterProblem& prob, double lambda, const Histogram& init,
    const DescentConfig& cfg);

/// Closed form for the regularized barycenter of two Dirac measures over a
/// fixed support: a_i proportional to exp(-lambda (Mz_i + My_i) / 2), where
/// Mz and My are the cost vectors from the support to the two delta
/// positions.
Histogram delta_pair_regularized_closed_form(const Eigen::VectorXd& cost_to_z,
                                             const Eigen::VectorXd& cost_to_y,
                                             double lambda);

namespace detail {

enum class DescentStatus { Converged, MaxIter, Stalled };

struct DescentResult {
  Histogram best;
  SolverTrace trace;
  DescentStatus status;
};

/// Generic driver shared by the barycenter solvers and the prediction
/// optimizer. `objective` and `gradient` must be evaluable anywhere on the
/// interior simplex with floor `epsilon`.
DescentResult minimize_over_interior_simplex(
    const std::function<double(const Histogram&)>& objective,
    const std::function<Eigen::VectorXd(const InteriorHistogram&)>& gradient,
    const Histogram& init, double epsilon, double initial_step,
    const DescentConfig& cfg);

}  // namespace detail

}  // namespace sharpot
