#include "sharpot/sinkhorn.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sharpot/costs.hpp"
#include "sharpot/errors.hpp"

namespace sharpot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::VectorXd safe_log(const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = v[i] > 0.0 ? std::log(v[i]) : kNegInf;
  }
  return out;
}

// log sum_j exp(shift_j - lm(i, j)) for every row i; -inf entries drop out.
Eigen::VectorXd lse_rows(const Eigen::MatrixXd& lm, const Eigen::VectorXd& shift) {
  const Eigen::Index n = lm.rows();
  const Eigen::Index m = lm.cols();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double hi = kNegInf;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double x = shift[j] - lm(i, j);
      if (x > hi) hi = x;
    }
    if (hi == kNegInf) {
      out[i] = kNegInf;
      continue;
    }
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double x = shift[j] - lm(i, j);
      if (x != kNegInf) s += std::exp(x - hi);
    }
    out[i] = hi + std::log(s);
  }
  return out;
}

Eigen::VectorXd lse_cols(const Eigen::MatrixXd& lm, const Eigen::VectorXd& shift) {
  const Eigen::Index n = lm.rows();
  const Eigen::Index m = lm.cols();
  Eigen::VectorXd out(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double hi = kNegInf;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = shift[i] - lm(i, j);
      if (x > hi) hi = x;
    }
    if (hi == kNegInf) {
      out[j] = kNegInf;
      continue;
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = shift[i] - lm(i, j);
      if (x != kNegInf) s += std::exp(x - hi);
    }
    out[j] = hi + std::log(s);
  }
  return out;
}

void validate_config(const SinkhornConfig& cfg) {
  if (!(cfg.lambda > 0.0)) {
    throw InvalidInput("sinkhorn: lambda must be positive");
  }
  if (cfg.max_iter < 1) {
    throw InvalidInput("sinkhorn: max_iter must be positive");
  }
  if (!(cfg.marginal_tol > 0.0)) {
    throw InvalidInput("sinkhorn: marginal_tol must be positive");
  }
}

// Shifts the additive gauge so the potential of the last positive-mass
// column is exactly zero; zero-mass columns keep -inf.
void fix_gauge(Eigen::VectorXd& phi, Eigen::VectorXd& psi,
               const Eigen::VectorXd& b) {
  Eigen::Index pin = -1;
  for (Eigen::Index j = b.size() - 1; j >= 0; --j) {
    if (b[j] > 0.0) {
      pin = j;
      break;
    }
  }
  if (pin < 0) return;
  const double t = psi[pin];
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] += t;
  for (Eigen::Index j = 0; j < psi.size(); ++j) psi[j] -= t;
  psi[pin] = 0.0;
}

struct Finalized {
  DualPotentials duals;
  Eigen::MatrixXd plan;
  double residual;
};

Finalized finalize(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi,
                   const Histogram& a, const Histogram& b, const CostMatrix& M,
                   double lambda) {
  Eigen::VectorXd phi_g = phi;
  Eigen::VectorXd psi_g = psi;
  fix_gauge(phi_g, psi_g, b.weights());
  DualPotentials duals{phi_g / lambda, psi_g / lambda};
  Eigen::MatrixXd plan = plan_from_duals(duals, M, lambda);
  const double residual = marginal_violation(plan, a.weights(), b.weights());
  return Finalized{std::move(duals), std::move(plan), residual};
}

}  // namespace

bool recommend_log_domain(const CostMatrix& M, double lambda) {
  return lambda > 30.0 || lambda * M.entries().maxCoeff() > 500.0;
}

Eigen::MatrixXd plan_from_duals(const DualPotentials& duals, const CostMatrix& M,
                                double lambda) {
  const Eigen::Index n = duals.alpha.size();
  const Eigen::Index m = duals.beta.size();
  if (M.rows() != n || M.cols() != m) {
    throw InvalidInput("plan_from_duals: dimension mismatch");
  }
  Eigen::MatrixXd plan(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      plan(i, j) = std::exp(lambda * (duals.alpha[i] + duals.beta[j] - M(i, j)));
    }
  }
  return plan;
}

SinkhornSolution sinkhorn_solve(const Histogram& a, const Histogram& b,
                                const CostMatrix& M, const SinkhornConfig& cfg,
                                const DualPotentials* warm_start) {
  validate_config(cfg);
  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  if (M.rows() != n || M.cols() != m) {
    throw InvalidInput("sinkhorn_solve: cost matrix dimensions do not match marginals");
  }
  const double lambda = cfg.lambda;

  const bool has_zero =
      (a.weights().array() == 0.0).any() || (b.weights().array() == 0.0).any();
  if (!cfg.log_domain && has_zero) {
    throw InvalidInput(
        "sinkhorn_solve: zero-mass entries require log-domain mode");
  }

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(m);
  if (warm_start != nullptr) {
    if (warm_start->alpha.size() != n || warm_start->beta.size() != m) {
      throw InvalidInput("sinkhorn_solve: warm start dimension mismatch");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(warm_start->alpha[i]) && a[i] > 0.0) {
        throw InvalidInput("sinkhorn_solve: non-finite warm start potential");
      }
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!std::isfinite(warm_start->beta[j]) && b[j] > 0.0) {
        throw InvalidInput("sinkhorn_solve: non-finite warm start potential");
      }
    }
    phi = lambda * warm_start->alpha;
    psi = lambda * warm_start->beta;
  }

  if (cfg.log_domain) {
    const Eigen::MatrixXd lm = lambda * M.entries();
    const Eigen::VectorXd loga = safe_log(a.weights());
    const Eigen::VectorXd logb = safe_log(b.weights());
    Eigen::VectorXd row_lse = lse_rows(lm, psi);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
      phi = loga - row_lse;
      psi = logb - lse_cols(lm, phi);
      row_lse = lse_rows(lm, psi);

      // Cheap residual from the current potentials gates the exact one.
      double cheap = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double rs = (phi[i] == kNegInf || row_lse[i] == kNegInf)
                              ? 0.0
                              : std::exp(phi[i] + row_lse[i]);
        cheap += std::abs(rs - a[i]);
      }
      if (cheap <= cfg.marginal_tol || iter == cfg.max_iter) {
        Finalized fin = finalize(phi, psi, a, b, M, lambda);
        if (fin.residual <= cfg.marginal_tol) {
          TransportPlan plan(std::move(fin.plan), a, b, cfg.marginal_tol);
          return SinkhornSolution{std::move(plan), std::move(fin.duals), iter,
                                  fin.residual};
        }
        if (iter == cfg.max_iter) {
          std::ostringstream msg;
          msg << "sinkhorn_solve: residual " << fin.residual << " after " << iter
              << " iterations (tolerance " << cfg.marginal_tol << ")";
          throw NonConvergence(msg.str(), fin.residual, iter);
        }
      }
    }
  } else {
    // Entrywise std::exp: the vectorized form clamps instead of underflowing,
    // which would mask dead kernel rows below.
    Eigen::MatrixXd K(n, m);
    bool subnormal = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double k = std::exp(-lambda * M(i, j));
        subnormal = subnormal ||
                    (k > 0.0 && k < std::numeric_limits<double>::min());
        K(i, j) = k;
      }
    }
    if (subnormal || (K.rowwise().maxCoeff().array() == 0.0).any() ||
        (K.colwise().maxCoeff().array() == 0.0).any()) {
      throw NumericalOverflow(
          "sinkhorn_solve: exp(-lambda*M) left the normal range; enable "
          "log_domain");
    }
    Eigen::VectorXd u = phi.array().exp();
    Eigen::VectorXd v = psi.array().exp();
    Eigen::VectorXd kv = K * v;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
      u = a.weights().array() / kv.array();
      const Eigen::VectorXd ktu = K.transpose() * u;
      v = b.weights().array() / ktu.array();
      kv = K * v;
      if (!u.allFinite() || !v.allFinite() || (u.array() == 0.0).any() ||
          (v.array() == 0.0).any()) {
        throw NumericalOverflow(
            "sinkhorn_solve: scaling vectors left the representable range; "
            "enable log_domain");
      }

      const double cheap =
          (u.array() * kv.array() - a.weights().array()).abs().sum() +
          (v.array() * ktu.array() - b.weights().array()).abs().sum();
      if (cheap <= cfg.marginal_tol || iter == cfg.max_iter) {
        Finalized fin = finalize(u.array().log(), v.array().log(), a, b, M, lambda);
        if (fin.residual <= cfg.marginal_tol) {
          TransportPlan plan(std::move(fin.plan), a, b, cfg.marginal_tol);
          return SinkhornSolution{std::move(plan), std::move(fin.duals), iter,
                                  fin.residual};
        }
        if (iter == cfg.max_iter) {
          std::ostringstream msg;
          msg << "sinkhorn_solve: residual " << fin.residual << " after " << iter
              << " iterations (tolerance " << cfg.marginal_tol << ")";
          throw NonConvergence(msg.str(), fin.residual, iter);
        }
      }
    }
  }
  throw NonConvergence("sinkhorn_solve: iteration budget exhausted", 0.0,
                       cfg.max_iter);  // unreachable
}

double regularized_distance(const Histogram& a, const Histogram& b,
                            const CostMatrix& M, const SinkhornConfig& cfg) {
  const SinkhornSolution sol = sinkhorn_solve(a, b, M, cfg);
  const double transport = (sol.plan.entries().array() * M.entries().array()).sum();
  return transport - entropy(sol.plan) / cfg.lambda;
}

double sharp_distance(const Histogram& a, const Histogram& b,
                      const CostMatrix& M, const SinkhornConfig& cfg) {
  const SinkhornSolution sol = sinkhorn_solve(a, b, M, cfg);
  return (sol.plan.entries().array() * M.entries().array()).sum();
}

}  // namespace sharpot
