#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sharpot/costs.hpp"
#include "sharpot/errors.hpp"
#include "sharpot/simplex.hpp"
#include "sharpot/types.hpp"
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

}  // namespace

TEST_CASE("histogram validates its invariants") {
  CHECK_NOTHROW(Histogram(vec({0.3, 0.7})));
  CHECK_THROWS_AS(Histogram(vec({0.3, 0.6})), InvalidInput);
  CHECK_THROWS_AS(Histogram(vec({-0.1, 1.1})), InvalidInput);
  CHECK_THROWS_AS(Histogram(vec({0.5, std::nan("")})), InvalidInput);
  CHECK_THROWS_AS(Histogram(Eigen::VectorXd()), InvalidInput);
  // within the 1e-12 band is accepted verbatim, no renormalization
  Histogram h(vec({0.5, 0.5 + 5e-13}));
  CHECK(h[1] == 0.5 + 5e-13);
}

TEST_CASE("interior histogram enforces the epsilon floor") {
  CHECK_NOTHROW(InteriorHistogram(Histogram(vec({0.5, 0.5})), 0.1));
  CHECK_THROWS_AS(InteriorHistogram(Histogram(vec({0.95, 0.05})), 0.1),
                  InvalidInput);
  CHECK_THROWS_AS(InteriorHistogram(Histogram(vec({0.5, 0.5})), 0.5),
                  InvalidInput);
  const auto ih = InteriorHistogram::from_positive(Histogram(vec({0.9, 0.1})));
  CHECK(ih.epsilon() == doctest::Approx(0.05));
}

TEST_CASE("simplex_project trivial cases") {
  CHECK(simplex_project(vec({0.3, 0.7})).weights() == vec({0.3, 0.7}));
  const Histogram p = simplex_project(vec({2.0, 0.0}));
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK_THROWS_AS(simplex_project(vec({1.0, std::nan("")})), InvalidInput);
}

TEST_CASE("simplex_project matches the brute-force grid oracle at n = 5") {
  auto rng = tt::make_rng(42);
  for (int rep = 0; rep < 3; ++rep) {
    const Eigen::VectorXd v = tt::random_vector(rng, 5, -1.0, 2.0);
    const Histogram p = simplex_project(v);
    // Projection distance is strictly convex, so the shrinking grid sweep
    // (final resolution 1e-3) cannot miss the global minimizer.
    const Eigen::VectorXd oracle = tt::refine_simplex_minimizer(
        5, 1e-3, [&](const Eigen::VectorXd& q) { return (q - v).squaredNorm(); });
    CHECK((p.weights() - oracle).cwiseAbs().maxCoeff() <= 2e-3);
  }
}

TEST_CASE("simplex_project is exactly idempotent and always feasible") {
  auto rng = tt::make_rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rep % 12);
    const Eigen::VectorXd v = tt::random_vector(rng, n, -3.0, 3.0);
    const Histogram p = simplex_project(v);  // Histogram ctor checks feasibility
    const Histogram q = simplex_project(p.weights());
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(q[i] == p[i]);  // bit-exact
    }
  }
}

TEST_CASE("clip_to_interior") {
  SUBCASE("uniform is already interior") {
    const Histogram u = Histogram::uniform(4);
    const auto out = clip_to_interior(u, 0.2);
    CHECK(out.weights() == u.weights());
  }
  SUBCASE("boundary point matches the interior grid oracle") {
    const Histogram p(vec({1.0, 0.0}));
    const auto out = clip_to_interior(p, 0.1);
    CHECK(out.weights()[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(out.weights()[1] == doctest::Approx(0.1).epsilon(1e-12));
    // brute force over the eps-interior segment of the 2-simplex
    double best = 1e100;
    double best_q0 = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double q0 = 0.1 + 0.8 * static_cast<double>(k) / 1000.0;
      const double d = (q0 - 1.0) * (q0 - 1.0) + (1.0 - q0) * (1.0 - q0);
      if (d < best) {
        best = d;
        best_q0 = q0;
      }
    }
    CHECK(std::abs(out.weights()[0] - best_q0) <= 1e-3);
  }
  SUBCASE("idempotent on interior points") {
    const Histogram p(vec({0.5, 0.5}));
    const auto out = clip_to_interior(p, 0.2);
    CHECK(out.weights() == p.weights());
  }
  SUBCASE("epsilon >= 1/n rejected") {
    CHECK_THROWS_AS(clip_to_interior(Histogram(vec({0.5, 0.5})), 0.6),
                    InvalidInput);
  }
  SUBCASE("output always satisfies the floor") {
    auto rng = tt::make_rng(3);
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd v = tt::random_vector(rng, 6, 0.0, 1.0);
      v /= v.sum();
      const auto out = clip_to_interior(Histogram(v), 0.05);
      CHECK((out.weights().array() >= 0.05).all());
    }
  }
}

TEST_CASE("cost_from_points") {
  SUBCASE("squared distances on integers") {
    const std::vector<Eigen::VectorXd> pts = {vec({0.0}), vec({1.0})};
    const CostMatrix m = cost_from_points(pts, pts, 2.0);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == 1.0);
    CHECK(m(1, 1) == 0.0);
  }
  SUBCASE("single pair") {
    const CostMatrix m =
        cost_from_points({vec({0.0})}, {vec({20.0})}, 2.0);
    CHECK(m(0, 0) == 400.0);
  }
  SUBCASE("p = 1 matches hand-computed distances") {
    auto rng = tt::make_rng(11);
    std::vector<Eigen::VectorXd> pts;
    for (int k = 0; k < 3; ++k) pts.push_back(tt::random_vector(rng, 2, -1.0, 1.0));
    const CostMatrix m = cost_from_points(pts, pts, 1.0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double dx = pts[i][0] - pts[j][0];
        const double dy = pts[i][1] - pts[j][1];
        CHECK(m(i, j) == doctest::Approx(std::sqrt(dx * dx + dy * dy)).epsilon(1e-14));
      }
    }
  }
  SUBCASE("symmetric with zero diagonal when xs == ys and p = 2") {
    auto rng = tt::make_rng(13);
    std::vector<Eigen::VectorXd> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(tt::random_vector(rng, 3, -2.0, 2.0));
    const CostMatrix m = cost_from_points(pts, pts, 2.0);
    CHECK(m.entries().diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.entries() - m.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cost_from_points({}, {vec({0.0})}, 2.0), InvalidInput);
    CHECK_THROWS_AS(cost_from_points({vec({0.0})}, {vec({0.0})}, 0.5),
                    InvalidInput);
  }
}

TEST_CASE("entropy") {
  Eigen::MatrixXd t(1, 1);
  t << 1.0;
  CHECK(entropy(t) == doctest::Approx(1.0).epsilon(1e-15));

  Eigen::MatrixXd half(1, 2);
  half << 0.5, 0.5;
  CHECK(entropy(half) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));

  // zero entries follow the 0 log 0 = 0 convention
  Eigen::MatrixXd sparse(2, 2);
  sparse << 1.0, 0.0, 0.0, 0.0;
  CHECK(entropy(sparse) == doctest::Approx(1.0).epsilon(1e-15));

  // h >= 1 for any coupling of total mass one
  auto rng = tt::make_rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd m = tt::random_cost(rng, 3, 3, 1.0).entries();
    m /= m.sum();
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        direct -= m(i, j) * (std::log(m(i, j)) - 1.0);
      }
    }
    CHECK(entropy(m) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(entropy(m) >= 1.0);
  }
}

TEST_CASE("tangent vector invariants") {
  CHECK_NOTHROW(TangentVector(vec({0.5, -0.5})));
  CHECK_THROWS_AS(TangentVector(vec({0.5, -0.3})), InvalidInput);
  const TangentVector t = tangent_project(vec({3.0, 1.0, 2.0}));
  CHECK(std::abs(t.components().sum()) <= 1e-12);
  CHECK(t[0] == doctest::Approx(1.0));
}

TEST_CASE("transport plan feasibility gate") {
  Eigen::MatrixXd entries(2, 2);
  entries << 0.5, 0.0, 0.0, 0.5;
  const Histogram half(vec({0.5, 0.5}));
  CHECK_NOTHROW(TransportPlan(entries, half, half, 1e-10));
  entries(0, 0) = 0.4;
  CHECK_THROWS_AS(TransportPlan(entries, half, half, 1e-10), InvalidInput);
}
