// Test-only oracles and generators: brute-force grid searches, central
// finite differences, and seeded random instances. Everything here is
// independent of the implementation paths it is used to check.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "sharpot/types.hpp"

namespace sharpot::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n,
                                     double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Random histogram with every entry at least `floor` after normalization.
inline Histogram random_histogram(std::mt19937_64& rng, Eigen::Index n,
                                  double floor = 0.05) {
  Eigen::VectorXd v = random_vector(rng, n, floor, 1.0);
  v /= v.sum();
  return Histogram(v);
}

inline CostMatrix random_cost(std::mt19937_64& rng, Eigen::Index n,
                              Eigen::Index m, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(0.0, scale);
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = dist(rng);
  }
  return CostMatrix(std::move(c));
}

/// Unit-norm tangent direction (components sum to zero).
inline Eigen::VectorXd random_tangent(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  v.array() -= v.mean();
  const double norm = v.norm();
  return norm > 0.0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Zero(n);
}

/// Enumerates every lattice point of the simplex with the given resolution:
/// all nonnegative integer compositions (k_1,...,k_n) of `steps`, visited as
/// histograms k/steps.
inline void for_each_simplex_grid_point(
    Eigen::Index n, int steps,
    const std::function<void(const Eigen::VectorXd&)>& visit) {
  Eigen::VectorXd point(n);
  std::function<void(Eigen::Index, int)> recurse = [&](Eigen::Index coord,
                                                       int remaining) {
    if (coord == n - 1) {
      point[coord] = static_cast<double>(remaining) / static_cast<double>(steps);
      visit(point);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      point[coord] = static_cast<double>(k) / static_cast<double>(steps);
      recurse(coord + 1, remaining - k);
    }
  };
  recurse(0, steps);
}

/// Multi-resolution brute-force minimizer over the simplex: coarse global
/// sweep, then shrinking local sweeps around the incumbent down to
/// `final_step`. Sound for strictly convex objectives, where the local
/// refinement cannot lose the global minimizer.
inline Eigen::VectorXd refine_simplex_minimizer(
    Eigen::Index n, double final_step,
    const std::function<double(const Eigen::VectorXd&)>& objective) {
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double best_val = objective(best);
  double span = 1.0;
  double step = 0.1;
  while (true) {
    // Sweep a box of half-width `span` around the incumbent at resolution
    // `step`, restricted to the simplex.
    const int radius = static_cast<int>(std::ceil(span / step));
    Eigen::VectorXd point(n);
    std::function<void(Eigen::Index, double)> recurse = [&](Eigen::Index coord,
                                                            double used) {
      if (coord == n - 1) {
        const double last = 1.0 - used;
        if (last < -1e-12) return;
        point[coord] = std::max(0.0, last);
        if (std::abs(point[coord] - best[coord]) > span + 1e-12) return;
        const double val = objective(point);
        if (val < best_val) {
          best_val = val;
          best = point;
        }
        return;
      }
      for (int k = -radius; k <= radius; ++k) {
        const double x = best[coord] + static_cast<double>(k) * step;
        if (x < -1e-12 || used + x > 1.0 + 1e-12) continue;
        point[coord] = std::max(0.0, x);
        recurse(coord + 1, used + point[coord]);
      }
    };
    recurse(0, 0.0);
    if (step <= final_step) break;
    span = 2.0 * step;
    step = std::max(final_step, step / 10.0);
  }
  return best;
}

/// Central finite difference of a scalar function along a tangent direction,
/// renormalizing the perturbed points onto the simplex.
inline double tangent_directional_derivative(
    const std::function<double(const Histogram&)>& f, const Histogram& at,
    const Eigen::VectorXd& direction, double step) {
  const auto shift = [&](double s) {
    Eigen::VectorXd v = at.weights() + s * direction;
    v /= v.sum();
    return Histogram(v);
  };
  return (f(shift(step)) - f(shift(-step))) / (2.0 * step);
}

/// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

/// Relative error with a floor shielding near-zero denominators.
inline double relative_error(double got, double want, double floor = 1e-2) {
  return std::abs(got - want) /
         std::max({std::abs(got), std::abs(want), floor});
}

}  // namespace sharpot::testing
