#include "sharpot/barycenter.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "sharpot/costs.hpp"
#include "sharpot/exact.hpp"
#include "sharpot/gradient.hpp"
#include "sharpot/simplex.hpp"

namespace sharpot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_cost(const BarycenterProblem& prob) {
  double hi = 0.0;
  for (const auto& c : prob.costs) {
    hi = std::max(hi, c.entries().maxCoeff());
  }
  return hi;
}

SinkhornConfig measure_config(const SinkhornConfig& base, double lambda,
                              const CostMatrix& M) {
  SinkhornConfig cfg = base;
  cfg.lambda = lambda;
  cfg.log_domain = base.log_domain || recommend_log_domain(M, lambda);
  return cfg;
}

// Evaluates the weighted barycenter functional and its gradient, warm
// starting every inner solve from the previous duals of the same measure and
// reusing solutions when objective and gradient are queried at one point.
class BarycenterEvaluator {
 public:
  BarycenterEvaluator(const BarycenterProblem& prob, double lambda,
                      const SinkhornConfig& base, Metric metric)
      : prob_(prob), lambda_(lambda), metric_(metric),
        duals_(prob.measures.size()) {
    configs_.reserve(prob.costs.size());
    for (const auto& c : prob.costs) {
      configs_.push_back(measure_config(base, lambda, c));
    }
  }

  double objective(const Histogram& mu) {
    solve_all(mu);
    double total = 0.0;
    for (size_t i = 0; i < solutions_.size(); ++i) {
      const auto& sol = solutions_[i];
      const double transport =
          (sol.plan.entries().array() * prob_.costs[i].entries().array()).sum();
      const double term = metric_ == Metric::Sharp
                              ? transport
                              : transport - entropy(sol.plan) / lambda_;
      total += prob_.weights[static_cast<Eigen::Index>(i)] * term;
    }
    return total;
  }

  Eigen::VectorXd gradient(const InteriorHistogram& mu) {
    solve_all(mu.histogram());
    Eigen::VectorXd total = Eigen::VectorXd::Zero(mu.size());
    for (size_t i = 0; i < solutions_.size(); ++i) {
      const auto& sol = solutions_[i];
      const Eigen::VectorXd g =
          metric_ == Metric::Sharp
              ? sharp_gradient_from_solution(sol, prob_.costs[i]).components()
              : tangent_project(sol.duals.alpha).components();
      total += prob_.weights[static_cast<Eigen::Index>(i)] * g;
    }
    return total;
  }

 private:
  void solve_all(const Histogram& mu) {
    if (last_mu_.size() == mu.size() && last_mu_ == mu.weights()) {
      return;
    }
    solutions_.clear();
    solutions_.reserve(prob_.measures.size());
    for (size_t i = 0; i < prob_.measures.size(); ++i) {
      const DualPotentials* warm = duals_[i] ? &*duals_[i] : nullptr;
      solutions_.push_back(sinkhorn_solve(mu, prob_.measures[i], prob_.costs[i],
                                          configs_[i], warm));
      duals_[i] = solutions_.back().duals;
    }
    last_mu_ = mu.weights();
  }

  const BarycenterProblem& prob_;
  double lambda_;
  Metric metric_;
  std::vector<SinkhornConfig> configs_;
  std::vector<std::optional<DualPotentials>> duals_;
  std::vector<SinkhornSolution> solutions_;
  Eigen::VectorXd last_mu_;
};

}  // namespace

DescentOutcome barycenter_descent(const BarycenterProblem& prob, double lambda,
                                  const Histogram& init, const DescentConfig& cfg,
                                  Metric metric) {
  prob.validate();
  if (metric == Metric::Exact) {
    throw InvalidInput("barycenter_descent: the exact metric has no gradient");
  }
  if (!(lambda > 0.0)) {
    throw InvalidInput("barycenter: lambda must be positive");
  }
  if (init.size() != prob.support_size) {
    throw InvalidInput("barycenter: init length does not match support size");
  }
  const double n = static_cast<double>(prob.support_size);
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-8 / n;
  const double hi = max_cost(prob);
  const double step0 =
      cfg.initial_step > 0.0 ? cfg.initial_step
                             : 1.0 / std::max(lambda * hi, 1e-12);

  BarycenterEvaluator eval(prob, lambda, cfg.solver, metric);
  auto result = detail::minimize_over_interior_simplex(
      [&eval](const Histogram& mu) { return eval.objective(mu); },
      [&eval](const InteriorHistogram& mu) { return eval.gradient(mu); }, init,
      eps, step0, cfg);
  return DescentOutcome{std::move(result.best), std::move(result.trace),
                        result.status == detail::DescentStatus::Stalled};
}

void BarycenterProblem::validate() const {
  if (measures.empty()) {
    throw InvalidInput("BarycenterProblem: no measures");
  }
  if (costs.size() != measures.size() ||
      weights.size() != static_cast<Eigen::Index>(measures.size())) {
    throw InvalidInput("BarycenterProblem: measures, costs and weights must align");
  }
  if (support_size < 1) {
    throw InvalidInput("BarycenterProblem: support size must be positive");
  }
  for (size_t i = 0; i < measures.size(); ++i) {
    if (costs[i].rows() != support_size ||
        costs[i].cols() != measures[i].size()) {
      throw InvalidInput("BarycenterProblem: cost matrix dimensions do not match");
    }
  }
  if (!weights.allFinite()) {
    throw InvalidInput("BarycenterProblem: non-finite weight");
  }
  if (!relaxed) {
    if ((weights.array() < 0.0).any()) {
      throw InvalidInput("BarycenterProblem: negative weight outside relaxed mode");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
      throw InvalidInput("BarycenterProblem: weights must sum to one");
    }
  }
}

double barycenter_functional(const Histogram& mu, const BarycenterProblem& prob,
                             Metric metric, double lambda,
                             const SinkhornConfig* solver_cfg) {
  prob.validate();
  if (mu.size() != prob.support_size) {
    throw InvalidInput("barycenter_functional: histogram length does not match support");
  }
  const SinkhornConfig base = solver_cfg != nullptr ? *solver_cfg : SinkhornConfig{};
  double total = 0.0;
  for (size_t i = 0; i < prob.measures.size(); ++i) {
    double d = 0.0;
    switch (metric) {
      case Metric::Exact:
        d = exact_wasserstein(mu, prob.measures[i], prob.costs[i]).value;
        break;
      case Metric::Sharp:
        d = sharp_distance(mu, prob.measures[i], prob.costs[i],
                           measure_config(base, lambda, prob.costs[i]));
        break;
      case Metric::Regularized:
        d = regularized_distance(mu, prob.measures[i], prob.costs[i],
                                 measure_config(base, lambda, prob.costs[i]));
        break;
    }
    total += prob.weights[static_cast<Eigen::Index>(i)] * d;
  }
  return total;
}

Histogram regularized_barycenter_ibp(const BarycenterProblem& prob,
                                     double lambda, double tol, int max_iter) {
  prob.validate();
  if (prob.relaxed || (prob.weights.array() <= 0.0).any()) {
    throw InvalidInput("regularized_barycenter_ibp: weights must be strictly positive");
  }
  if (!(lambda > 0.0) || !(tol > 0.0) || max_iter < 1) {
    throw InvalidInput("regularized_barycenter_ibp: bad parameters");
  }
  const Eigen::Index n = prob.support_size;
  const size_t count = prob.measures.size();

  bool log_mode = false;
  for (size_t i = 0; i < count && !log_mode; ++i) {
    log_mode = recommend_log_domain(prob.costs[i], lambda) ||
               (prob.measures[i].weights().array() == 0.0).any();
  }

  // Scaled potentials: lphi[i] = log(K_i v_i), lv[i] = log v_i. The coupling
  // step is the elementwise geometric mean a = prod_i (K_i v_i)^{w_i},
  // normalized each iteration for stability.
  std::vector<Eigen::VectorXd> lv(count);
  std::vector<Eigen::MatrixXd> lk(count);   // -lambda * M_i (log mode)
  std::vector<Eigen::MatrixXd> kk(count);   // exp(-lambda * M_i) (linear mode)
  for (size_t i = 0; i < count; ++i) {
    lv[i] = Eigen::VectorXd::Zero(prob.measures[i].size());
    if (log_mode) {
      lk[i] = -lambda * prob.costs[i].entries();
    } else {
      kk[i] = (-lambda * prob.costs[i].entries().array()).exp();
    }
  }

  const auto log_measure = [&](size_t i) {
    Eigen::VectorXd out(prob.measures[i].size());
    for (Eigen::Index j = 0; j < out.size(); ++j) {
      const double w = prob.measures[i][j];
      out[j] = w > 0.0 ? std::log(w) : kNegInf;
    }
    return out;
  };

  Eigen::VectorXd a_prev = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double last_delta = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::VectorXd la = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::VectorXd> lphi(count);
    for (size_t i = 0; i < count; ++i) {
      if (log_mode) {
        Eigen::VectorXd p(n);
        for (Eigen::Index r = 0; r < n; ++r) {
          double hi = kNegInf;
          for (Eigen::Index j = 0; j < lv[i].size(); ++j) {
            hi = std::max(hi, lv[i][j] + lk[i](r, j));
          }
          if (hi == kNegInf) {
            p[r] = kNegInf;
            continue;
          }
          double s = 0.0;
          for (Eigen::Index j = 0; j < lv[i].size(); ++j) {
            const double x = lv[i][j] + lk[i](r, j);
            if (x != kNegInf) s += std::exp(x - hi);
          }
          p[r] = hi + std::log(s);
        }
        lphi[i] = std::move(p);
      } else {
        const Eigen::VectorXd phi = kk[i] * lv[i].array().exp().matrix();
        if ((phi.array() <= 0.0).any() || !phi.allFinite()) {
          throw NumericalOverflow(
              "regularized_barycenter_ibp: scaling underflow; instance needs "
              "log-domain updates");
        }
        lphi[i] = phi.array().log();
      }
      la += prob.weights[static_cast<Eigen::Index>(i)] * lphi[i];
    }

    Eigen::VectorXd a = (la.array() - la.maxCoeff()).exp();
    a /= a.sum();

    for (size_t i = 0; i < count; ++i) {
      const Eigen::VectorXd lu = la - lphi[i];
      const Eigen::VectorXd lnu = log_measure(i);
      if (log_mode) {
        for (Eigen::Index j = 0; j < lv[i].size(); ++j) {
          double hi = kNegInf;
          for (Eigen::Index r = 0; r < n; ++r) {
            hi = std::max(hi, lu[r] + lk[i](r, j));
          }
          double s = 0.0;
          for (Eigen::Index r = 0; r < n; ++r) {
            const double x = lu[r] + lk[i](r, j);
            if (x != kNegInf) s += std::exp(x - hi);
          }
          lv[i][j] = hi == kNegInf ? kNegInf : lnu[j] - (hi + std::log(s));
        }
      } else {
        const Eigen::VectorXd ktu = kk[i].transpose() * lu.array().exp().matrix();
        if ((ktu.array() <= 0.0).any() || !ktu.allFinite()) {
          throw NumericalOverflow(
              "regularized_barycenter_ibp: scaling underflow; instance needs "
              "log-domain updates");
        }
        lv[i] = lnu.array() - ktu.array().log();
      }
    }

    const double delta = (a - a_prev).lpNorm<1>();
    last_delta = delta;
    a_prev = a;
    if (delta <= tol) {
      a /= a.sum();
      return Histogram(std::move(a));
    }
  }

  std::ostringstream msg;
  msg << "regularized_barycenter_ibp: no fixed point within " << max_iter
      << " iterations (last L1 change " << last_delta << ")";
  throw BarycenterNonConvergence(msg.str(), last_delta, max_iter, a_prev);
}

namespace {

std::pair<Histogram, SolverTrace> descent_or_throw(const BarycenterProblem& prob,
                                                   double lambda,
                                                   const Histogram& init,
                                                   const DescentConfig& cfg,
                                                   Metric metric) {
  DescentOutcome out = barycenter_descent(prob, lambda, init, cfg, metric);
  if (out.stalled) {
    throw OptimizerStall("barycenter descent stalled at the minimum step",
                         std::move(out.trace));
  }
  return {std::move(out.best), std::move(out.trace)};
}

}  // namespace

std::pair<Histogram, SolverTrace> sharp_barycenter_gd(
    const BarycenterProblem& prob, double lambda, const Histogram& init,
    const DescentConfig& cfg) {
  return descent_or_throw(prob, lambda, init, cfg, Metric::Sharp);
}

std::pair<Histogram, SolverTrace> regularized_barycenter_gd(
    const BarycenterProblem& prob, double lambda, const Histogram& init,
    const DescentConfig& cfg) {
  return descent_or_throw(prob, lambda, init, cfg, Metric::Regularized);
}

Histogram delta_pair_regularized_closed_form(const Eigen::VectorXd& cost_to_z,
                                             const Eigen::VectorXd& cost_to_y,
                                             double lambda) {
  if (cost_to_z.size() == 0 || cost_to_z.size() != cost_to_y.size()) {
    throw InvalidInput("delta_pair_regularized_closed_form: cost vectors must match");
  }
  if (!cost_to_z.allFinite() || !cost_to_y.allFinite()) {
    throw InvalidInput("delta_pair_regularized_closed_form: non-finite cost");
  }
  if (!(lambda > 0.0)) {
    throw InvalidInput("delta_pair_regularized_closed_form: lambda must be positive");
  }
  Eigen::VectorXd expo = -lambda / 2.0 * (cost_to_z + cost_to_y);
  Eigen::VectorXd a = (expo.array() - expo.maxCoeff()).exp();
  a /= a.sum();
  return Histogram(std::move(a));
}

namespace detail {

DescentResult minimize_over_interior_simplex(
    const std::function<double(const Histogram&)>& objective,
    const std::function<Eigen::VectorXd(const InteriorHistogram&)>& gradient,
    const Histogram& init, double epsilon, double initial_step,
    const DescentConfig& cfg) {
  const Eigen::Index n = init.size();
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / static_cast<double>(n))) {
    throw InvalidInput("descent: epsilon must lie in (0, 1/n)");
  }
  if (!(initial_step > 0.0)) {
    throw InvalidInput("descent: initial step must be positive");
  }

  const auto proj = [&](const Eigen::VectorXd& v) {
    return project_to_interior(v, epsilon);
  };

  Histogram x = (init.weights().array() >= epsilon).all() ? init
                                                          : proj(init.weights());
  double fx = objective(x);

  Histogram best = x;
  double fbest = fx;
  Histogram x_prev = x;
  double t_mom = 1.0;
  double step = initial_step;
  bool force_plain = false;

  SolverTrace trace;
  trace.objectives.push_back(fx);
  trace.step_sizes.push_back(0.0);
  DescentStatus status = DescentStatus::MaxIter;

  int iter = 0;
  while (iter < cfg.max_iter) {
    ++iter;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    const double beta = force_plain ? 0.0 : (t_mom - 1.0) / t_next;

    Histogram y = x;
    double fy = fx;
    Eigen::VectorXd g;
    bool momentum_point = beta != 0.0 &&
                          (x.weights() - x_prev.weights()).lpNorm<1>() > 0.0;
    try {
      if (momentum_point) {
        y = proj(x.weights() + beta * (x.weights() - x_prev.weights()));
        fy = objective(y);
      }
      g = gradient(InteriorHistogram(y, epsilon));
    } catch (const Error&) {
      if (momentum_point) {
        // The extrapolated point broke the inner solver; restart momentum.
        force_plain = true;
        t_mom = 1.0;
        continue;
      }
      throw;
    }

    const Histogram ref = proj(y.weights() - initial_step * g);
    const double pg_norm = (y.weights() - ref.weights()).norm() / initial_step;
    trace.final_grad_norm = pg_norm;
    if (pg_norm <= cfg.grad_tol) {
      status = DescentStatus::Converged;
      break;
    }

    bool accepted = false;
    double s = step;
    Histogram cand = x;
    double fc = fx;
    while (s >= cfg.min_step) {
      cand = proj(y.weights() - s * g);
      fc = objective(cand);
      const double move2 = (cand.weights() - y.weights()).squaredNorm();
      if (fc <= fy - cfg.sufficient_decrease * move2 / s) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }

    if (accepted && fc <= fx) {
      x_prev = x;
      x = cand;
      fx = fc;
      t_mom = t_next;
      force_plain = false;
      step = std::min(s * 2.0, initial_step * cfg.step_growth_cap);
      trace.objectives.push_back(fc);
      trace.step_sizes.push_back(s);
      if (fc < fbest) {
        fbest = fc;
        best = x;
      }
      continue;
    }

    if (momentum_point) {
      // Objective increased along the momentum path; restart from x.
      force_plain = true;
      t_mom = 1.0;
      continue;
    }

    status = DescentStatus::Stalled;
    break;
  }

  trace.iterations = iter;
  return DescentResult{std::move(best), std::move(trace), status};
}

}  // namespace detail

}  // namespace sharpot
