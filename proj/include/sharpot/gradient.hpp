#pragma once

#include <Eigen/Core>

#include "sharpot/sinkhorn.hpp"
#include "sharpot/types.hpp"

namespace sharpot {

/// Blocks of the reduced dual Hessian
///
///   [ diag(d1)   t_bar      ]
///   [ t_bar^T    diag(d2_inv) ]
///
/// where d1 = T 1_m, t_bar = T with the last column removed and
/// d2_inv = t_bar^T 1_n. For marginals in the interior of the simplex the
/// assembled matrix is symmetric positive definite.
struct HessianBlocks {
  Eigen::VectorXd d1;       // n
  Eigen::MatrixXd t_bar;    // n x (m-1)
  Eigen::VectorXd d2_inv;   // m-1, column sums of t_bar (the inverse of D2)
  Eigen::VectorXd reduced_b;  // m-1, b with the last element removed

  Eigen::Index rows() const { return d1.size(); }
  Eigen::Index reduced_cols() const { return d2_inv.size(); }

  /// Dense (n+m-1) x (n+m-1) assembly, for oracles and small instances.
  Eigen::MatrixXd assemble() const;
};

/// Extracts the Hessian blocks from a feasible plan.
HessianBlocks dual_hessian(const Histogram& a, const Histogram& b,
                           const TransportPlan& plan);

/// Solves (diag(d1) - t_bar diag(d2_inv)^{-1} t_bar^T) g = f.
///
/// When the reduced column count is below n this goes through the
/// (m-1) x (m-1) Schur complement diag(d2_inv) - t_bar^T diag(d1)^{-1} t_bar
/// with a Cholesky factorization, at O(n m^2) cost; a dense factorization of
/// the n x n system is used only when m-1 >= n.
Eigen::VectorXd solve_reduced(const HessianBlocks& blocks,
                              const Eigen::VectorXd& f);

/// Analytic gradient of the sharp Sinkhorn distance in its first argument,
/// projected onto the tangent space of the simplex.
TangentVector sharp_gradient(const InteriorHistogram& a,
                             const InteriorHistogram& b, const CostMatrix& M,
                             const SinkhornConfig& cfg);

/// Same assembly from an already-computed solve of the instance.
TangentVector sharp_gradient_from_solution(const SinkhornSolution& sol,
                                           const CostMatrix& M);

/// Gradient of the regularized Sinkhorn distance: the dual potential alpha,
/// projected onto the tangent space (the additive gauge is quotiented out).
TangentVector regularized_gradient(const InteriorHistogram& a,
                                   const InteriorHistogram& b,
                                   const CostMatrix& M,
                                   const SinkhornConfig& cfg);

}  // namespace sharpot
