#pragma once

#include <Eigen/Core>

#include "sharpot/types.hpp"

namespace sharpot {

/// Configuration of the Sinkhorn scaling solver. The defaults mirror the
/// standard protocol: L1 marginal violation below 1e-6 within 1000
/// iterations.
struct SinkhornConfig {
  double lambda = 1.0;        // entropic sharpness; the entropy weight is 1/lambda
  int max_iter = 1000;
  double marginal_tol = 1e-6; // L1 distance from the transportation polytope
  bool log_domain = false;    // stabilized log-sum-exp updates
};

/// Dual solution of the entropic transport problem under the gauge
/// beta[m-1] = 0 (the additive degree of freedom is pinned on the last
/// column). When the last column of b carries zero mass, its potential is
/// -inf and the gauge pins the last positive-mass column instead.
struct DualPotentials {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
};

/// The coupling determined by dual potentials:
///   T_ij = exp(lambda * (alpha_i + beta_j - M_ij)).
Eigen::MatrixXd plan_from_duals(const DualPotentials& duals, const CostMatrix& M,
                                double lambda);

struct SinkhornSolution {
  TransportPlan plan;
  DualPotentials duals;
  int iterations;
  double residual;  // final L1 marginal violation
};

/// True when the stabilized log-domain iterations should be preferred:
/// large lambda, or exp(-lambda * M_ij) close to underflow.
bool recommend_log_domain(const CostMatrix& M, double lambda);

/// Solves min_{T in Pi(a,b)} <T, M> - h(T)/lambda by Sinkhorn scaling.
///
/// The returned plan is evaluated from the gauged duals, so it reproduces
/// plan_from_duals exactly, and its marginal residual is at most
/// cfg.marginal_tol. Zero entries in a or b are supported only in log-domain
/// mode (their potentials are -inf and the corresponding rows/columns of the
/// plan are zero). An optional warm start seeds the potentials; the solve
/// remains a pure function of (inputs, config, warm start).
SinkhornSolution sinkhorn_solve(const Histogram& a, const Histogram& b,
                                const CostMatrix& M, const SinkhornConfig& cfg,
                                const DualPotentials* warm_start = nullptr);

/// <T, M> - h(T)/lambda at the entropic optimum.
double regularized_distance(const Histogram& a, const Histogram& b,
                            const CostMatrix& M, const SinkhornConfig& cfg);

/// <T, M> at the entropic optimum: the transport cost of the entropic plan
/// with the entropy term removed.
double sharp_distance(const Histogram& a, const Histogram& b,
                      const CostMatrix& M, const SinkhornConfig& cfg);

}  // namespace sharpot
