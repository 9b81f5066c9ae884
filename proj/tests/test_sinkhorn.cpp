#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sharpot/costs.hpp"
#include "sharpot/errors.hpp"
#include "sharpot/sinkhorn.hpp"
#include "support/oracles.hpp"

using namespace sharpot;
namespace tt = sharpot::testing;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

CostMatrix swap_cost() {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return CostMatrix(m);
}

// Brute force over the one-parameter family T(t) = [[t, .5-t],[.5-t, t]],
// which is the whole transportation polytope of uniform 2-bin marginals.
double grid_min_regularized_2x2(double lambda, double* arg_t = nullptr) {
  double best = 1e100;
  double best_t = 0.0;
  const int steps = 500000;  // 1e-6 resolution on [0, 0.5]
  for (int k = 0; k <= steps; ++k) {
    const double t = 0.5 * static_cast<double>(k) / static_cast<double>(steps);
    double h = 0.0;
    for (double v : {t, t, 0.5 - t, 0.5 - t}) {
      if (v > 0.0) h -= v * (std::log(v) - 1.0);
    }
    const double val = 2.0 * (0.5 - t) - h / lambda;
    if (val < best) {
      best = val;
      best_t = t;
    }
  }
  if (arg_t != nullptr) *arg_t = best_t;
  return best;
}

}  // namespace

TEST_CASE("singleton instance") {
  const Histogram one(vec({1.0}));
  const CostMatrix m(Eigen::MatrixXd::Constant(1, 1, 3.25));
  SinkhornConfig cfg;
  cfg.lambda = 1.7;

  const SinkhornSolution sol = sinkhorn_solve(one, one, m, cfg);
  CHECK(sol.plan.entries()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.residual <= 1e-13);
  CHECK(sol.duals.beta[0] == 0.0);

  CHECK(sharp_distance(one, one, m, cfg) == doctest::Approx(3.25).epsilon(1e-13));
  // h([[1]]) = 1, so the regularized value is c - 1/lambda
  CHECK(regularized_distance(one, one, m, cfg) ==
        doctest::Approx(3.25 - 1.0 / 1.7).epsilon(1e-13));
}

TEST_CASE("symmetric 2x2 instance is symmetric under transpose and swap") {
  const Histogram half(vec({0.5, 0.5}));
  SinkhornConfig cfg;
  cfg.lambda = 1.0;
  cfg.marginal_tol = 1e-12;
  cfg.max_iter = 10000;
  const SinkhornSolution sol = sinkhorn_solve(half, half, swap_cost(), cfg);
  const Eigen::MatrixXd& t = sol.plan.entries();
  CHECK(std::abs(t(0, 1) - t(1, 0)) <= 1e-14);  // transpose
  CHECK(std::abs(t(0, 0) - t(1, 1)) <= 1e-14);  // simultaneous swap
}

TEST_CASE("2x2 grid oracle pins both distances at lambda = 2") {
  const Histogram half(vec({0.5, 0.5}));
  SinkhornConfig cfg;
  cfg.lambda = 2.0;
  cfg.marginal_tol = 1e-12;
  cfg.max_iter = 20000;

  double t_star = 0.0;
  const double oracle_reg = grid_min_regularized_2x2(2.0, &t_star);
  // frozen from the oracle (closed form t* = e^2/(2(1+e^2)) agrees)
  CHECK(oracle_reg == doctest::Approx(-0.9100375958).epsilon(1e-9));
  CHECK(t_star == doctest::Approx(0.4403985).epsilon(1e-5));

  CHECK(regularized_distance(half, half, swap_cost(), cfg) ==
        doctest::Approx(oracle_reg).epsilon(1e-5));
  const double oracle_sharp = 2.0 * (0.5 - t_star);
  CHECK(oracle_sharp == doctest::Approx(0.1192029220).epsilon(1e-4));
  CHECK(sharp_distance(half, half, swap_cost(), cfg) ==
        doctest::Approx(oracle_sharp).epsilon(1e-5));
}

TEST_CASE("gauge and plan reproduction") {
  auto rng = tt::make_rng(101);
  for (int rep = 0; rep < 5; ++rep) {
    const Histogram a = tt::random_histogram(rng, 4);
    const Histogram b = tt::random_histogram(rng, 3);
    const CostMatrix m = tt::random_cost(rng, 4, 3, 2.0);
    SinkhornConfig cfg;
    cfg.lambda = 3.0;
    cfg.marginal_tol = 1e-10;
    cfg.max_iter = 50000;
    const SinkhornSolution sol = sinkhorn_solve(a, b, m, cfg);

    CHECK(sol.duals.beta[2] == 0.0);
    const Eigen::MatrixXd rebuilt = plan_from_duals(sol.duals, m, cfg.lambda);
    const Eigen::ArrayXXd rel = ((rebuilt - sol.plan.entries()).array() /
                                 sol.plan.entries().array())
                                    .abs();
    CHECK(rel.maxCoeff() <= 1e-10);
    CHECK(sol.residual <= cfg.marginal_tol);
  }
}

TEST_CASE("ordering and the entropy identity") {
  auto rng = tt::make_rng(202);
  for (int rep = 0; rep < 5; ++rep) {
    const Histogram a = tt::random_histogram(rng, 5);
    const Histogram b = tt::random_histogram(rng, 4);
    const CostMatrix m = tt::random_cost(rng, 5, 4, 3.0);
    SinkhornConfig cfg;
    cfg.lambda = 2.5;
    cfg.marginal_tol = 1e-10;
    cfg.max_iter = 50000;

    const SinkhornSolution sol = sinkhorn_solve(a, b, m, cfg);
    const double sharp = sharp_distance(a, b, m, cfg);
    const double reg = regularized_distance(a, b, m, cfg);
    CHECK(reg < sharp);  // h(T) > 0 strictly
    const double identity = sharp - entropy(sol.plan) / cfg.lambda;
    CHECK(std::abs(identity - reg) <= 1e-10);
  }
}

TEST_CASE("log-domain and linear-domain solvers agree") {
  auto rng = tt::make_rng(303);
  for (double lambda : {1.0, 10.0, 50.0}) {
    const Histogram a = tt::random_histogram(rng, 5);
    const Histogram b = tt::random_histogram(rng, 5);
    const CostMatrix m = tt::random_cost(rng, 5, 5, 2.0);
    SinkhornConfig lin;
    lin.lambda = lambda;
    lin.marginal_tol = 1e-11;
    lin.max_iter = 200000;
    SinkhornConfig log = lin;
    log.log_domain = true;
    CHECK(std::abs(sharp_distance(a, b, m, lin) - sharp_distance(a, b, m, log)) <=
          1e-8);
    CHECK(std::abs(regularized_distance(a, b, m, lin) -
                   regularized_distance(a, b, m, log)) <= 1e-8);
  }
}

TEST_CASE("determinism: identical runs produce identical bits") {
  auto rng = tt::make_rng(404);
  const Histogram a = tt::random_histogram(rng, 6);
  const Histogram b = tt::random_histogram(rng, 5);
  const CostMatrix m = tt::random_cost(rng, 6, 5, 1.5);
  SinkhornConfig cfg;
  cfg.lambda = 7.0;
  const SinkhornSolution s1 = sinkhorn_solve(a, b, m, cfg);
  const SinkhornSolution s2 = sinkhorn_solve(a, b, m, cfg);
  CHECK(s1.iterations == s2.iterations);
  CHECK((s1.plan.entries() - s2.plan.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.duals.alpha - s2.duals.alpha).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("warm starts accelerate nearby solves without changing the answer") {
  auto rng = tt::make_rng(505);
  const Histogram a = tt::random_histogram(rng, 6);
  const Histogram b = tt::random_histogram(rng, 6);
  const CostMatrix m = tt::random_cost(rng, 6, 6, 2.0);
  SinkhornConfig cfg;
  cfg.lambda = 5.0;
  cfg.marginal_tol = 1e-10;
  cfg.max_iter = 100000;
  const SinkhornSolution cold = sinkhorn_solve(a, b, m, cfg);
  const SinkhornSolution warm = sinkhorn_solve(a, b, m, cfg, &cold.duals);
  CHECK(warm.iterations <= cold.iterations);
  CHECK(warm.residual <= cfg.marginal_tol);
  // both land within marginal_tol of the same optimum
  CHECK((warm.plan.entries() - cold.plan.entries()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("zero-mass support") {
  const Histogram a(vec({0.5, 0.5, 0.0}));
  const Histogram b(vec({1.0}));
  Eigen::MatrixXd m(3, 1);
  m << 1.0, 2.0, 3.0;
  SinkhornConfig cfg;
  cfg.lambda = 2.0;

  SUBCASE("linear mode rejects zeros") {
    CHECK_THROWS_AS(sinkhorn_solve(a, b, CostMatrix(m), cfg), InvalidInput);
  }
  SUBCASE("log mode forces the zero row of the plan to zero") {
    cfg.log_domain = true;
    const SinkhornSolution sol = sinkhorn_solve(a, b, CostMatrix(m), cfg);
    CHECK(sol.plan.entries()(2, 0) == 0.0);
    CHECK(sol.plan.entries()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::isinf(sol.duals.alpha[2]));
  }
}

TEST_CASE("error paths") {
  const Histogram a(vec({0.3, 0.7}));
  const Histogram b(vec({0.6, 0.4}));

  SUBCASE("non-convergence carries the last residual") {
    SinkhornConfig cfg;
    cfg.lambda = 40.0;
    cfg.max_iter = 2;
    cfg.marginal_tol = 1e-14;
    try {
      sinkhorn_solve(a, b, swap_cost(), cfg);
      FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
      CHECK(e.iterations() == 2);
      CHECK(e.residual() > 1e-14);
    }
  }
  SUBCASE("underflowed kernel in linear mode reports overflow") {
    Eigen::MatrixXd m(2, 2);
    m << 800.0, 900.0, 850.0, 950.0;
    SinkhornConfig cfg;
    cfg.lambda = 1.0;  // exp(-800) is flushed to zero
    CHECK_THROWS_AS(sinkhorn_solve(a, b, CostMatrix(m), cfg), NumericalOverflow);
  }
  SUBCASE("log-domain policy") {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 20.0, 20.0, 0.0;
    CHECK(recommend_log_domain(CostMatrix(m), 31.0));
    CHECK(recommend_log_domain(CostMatrix(m), 26.0));  // 26 * 20 > 500
    CHECK(!recommend_log_domain(CostMatrix(m), 10.0));
  }
  SUBCASE("dimension mismatch") {
    SinkhornConfig cfg;
    CHECK_THROWS_AS(
        sinkhorn_solve(a, Histogram(vec({1.0})), swap_cost(), cfg), InvalidInput);
  }
}
