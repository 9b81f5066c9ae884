#include "sharpot/gradient.hpp"

#include <Eigen/Cholesky>

#include "sharpot/errors.hpp"

namespace sharpot {

Eigen::MatrixXd HessianBlocks::assemble() const {
  const Eigen::Index n = rows();
  const Eigen::Index r = reduced_cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + r, n + r);
  h.topLeftCorner(n, n).diagonal() = d1;
  h.topRightCorner(n, r) = t_bar;
  h.bottomLeftCorner(r, n) = t_bar.transpose();
  h.bottomRightCorner(r, r).diagonal() = d2_inv;
  return h;
}

HessianBlocks dual_hessian(const Histogram& a, const Histogram& b,
                           const TransportPlan& plan) {
  const Eigen::Index n = plan.entries().rows();
  const Eigen::Index m = plan.entries().cols();
  if (a.size() != n || b.size() != m) {
    throw InvalidInput("dual_hessian: marginal dimensions do not match plan");
  }
  HessianBlocks blocks;
  blocks.d1 = plan.entries().rowwise().sum();
  blocks.t_bar = plan.entries().leftCols(m - 1);
  blocks.d2_inv = blocks.t_bar.colwise().sum();
  blocks.reduced_b = b.weights().head(m - 1);
  return blocks;
}

Eigen::VectorXd solve_reduced(const HessianBlocks& blocks,
                              const Eigen::VectorXd& f) {
  const Eigen::Index n = blocks.rows();
  const Eigen::Index r = blocks.reduced_cols();
  if (f.size() != n) {
    throw InvalidInput("solve_reduced: right-hand side has wrong length");
  }
  if ((blocks.d1.array() <= 0.0).any()) {
    throw DegenerateInstance("solve_reduced: zero row mass");
  }

  if (r == 0) {
    return f.array() / blocks.d1.array();
  }
  if ((blocks.d2_inv.array() <= 0.0).any()) {
    throw DegenerateInstance("solve_reduced: zero reduced column mass");
  }

  const Eigen::VectorXd d1_inv = blocks.d1.cwiseInverse();

  if (r < n) {
    // Woodbury through the (m-1) x (m-1) Schur complement
    //   S = diag(d2_inv) - t_bar^T diag(d1)^{-1} t_bar,
    // positive definite for interior marginals. O(n m^2) overall.
    const Eigen::MatrixXd scaled = d1_inv.asDiagonal() * blocks.t_bar;
    Eigen::MatrixXd schur = -blocks.t_bar.transpose() * scaled;
    schur.diagonal() += blocks.d2_inv;
    const Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      throw DegenerateInstance("solve_reduced: Schur complement not positive definite");
    }
    const auto apply_h = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      const Eigen::VectorXd tx = blocks.t_bar.transpose() * x;
      return blocks.d1.asDiagonal() * x -
             blocks.t_bar * (tx.array() / blocks.d2_inv.array()).matrix();
    };
    const auto solve_once = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      const Eigen::VectorXd y = rhs.array() * d1_inv.array();
      return y + scaled * llt.solve(blocks.t_bar.transpose() * y);
    };
    Eigen::VectorXd g = solve_once(f);
    g += solve_once(f - apply_h(g));  // one refinement pass
    return g;
  }

  // Wide case (m-1 >= n): factor the n x n matrix directly.
  Eigen::MatrixXd h = -(blocks.t_bar.array().rowwise() /
                        blocks.d2_inv.transpose().array())
                           .matrix() *
                      blocks.t_bar.transpose();
  h.diagonal() += blocks.d1;
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw DegenerateInstance("solve_reduced: system not positive definite");
  }
  Eigen::VectorXd g = llt.solve(f);
  g += llt.solve(f - h * g);
  return g;
}

namespace {

SinkhornSolution solve_interior(const InteriorHistogram& a,
                                const InteriorHistogram& b, const CostMatrix& M,
                                const SinkhornConfig& cfg) {
  return sinkhorn_solve(a.histogram(), b.histogram(), M, cfg);
}

}  // namespace

TangentVector sharp_gradient(const InteriorHistogram& a,
                             const InteriorHistogram& b, const CostMatrix& M,
                             const SinkhornConfig& cfg) {
  return sharp_gradient_from_solution(solve_interior(a, b, M, cfg), M);
}

TangentVector sharp_gradient_from_solution(const SinkhornSolution& sol,
                                           const CostMatrix& M) {
  const Eigen::MatrixXd& plan = sol.plan.entries();
  const Eigen::MatrixXd loads = plan.cwiseProduct(M.entries());

  const HessianBlocks blocks =
      dual_hessian(sol.plan.row_marginal(), sol.plan.col_marginal(), sol.plan);
  const Eigen::Index m = plan.cols();

  // Right-hand side L 1_m - t_bar D2 (L-bar)^T 1_n. The published form of
  // this algorithm carries the opposite sign, which the m = 1 closed form
  // and finite differences both contradict.
  Eigen::VectorXd rhs = loads.rowwise().sum();
  if (m > 1) {
    const Eigen::VectorXd reduced_col_sums =
        loads.leftCols(m - 1).colwise().sum();
    rhs -= blocks.t_bar *
           (reduced_col_sums.array() / blocks.d2_inv.array()).matrix();
  }
  const Eigen::VectorXd g = solve_reduced(blocks, rhs);
  return tangent_project(g);
}

TangentVector regularized_gradient(const InteriorHistogram& a,
                                   const InteriorHistogram& b,
                                   const CostMatrix& M,
                                   const SinkhornConfig& cfg) {
  const SinkhornSolution sol = solve_interior(a, b, M, cfg);
  return tangent_project(sol.duals.alpha);
}

}  // namespace sharpot
