#include "sharpot/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sharpot/errors.hpp"

namespace sharpot {

namespace {

// Ascending-order sum of the positive entries. Canonical outputs of the
// projection make this exactly 1.0, which is what the idempotence early-exit
// below tests for.
double ascending_positive_sum(const Eigen::VectorXd& v) {
  std::vector<double> pos;
  pos.reserve(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) pos.push_back(v[i]);
  }
  std::sort(pos.begin(), pos.end());
  double s = 0.0;
  for (double x : pos) s += x;
  return s;
}

}  // namespace

Histogram simplex_project(const Eigen::VectorXd& v) {
  if (v.size() == 0) {
    throw InvalidInput("simplex_project: empty input");
  }
  if (!v.allFinite()) {
    throw InvalidInput("simplex_project: non-finite input");
  }
  const Eigen::Index n = v.size();

  // Canonical points pass through untouched; re-projection is bit-exact.
  if ((v.array() >= 0.0).all() && ascending_positive_sum(v) == 1.0) {
    return Histogram(v);
  }

  // Sort-and-threshold: the unique KKT point keeps the k largest entries,
  // k = max{j : v_(j) - (sum_(i<=j) v_(i) - 1)/j > 0}.
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double prefix = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    prefix += sorted[static_cast<size_t>(j)];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<size_t>(j)] - candidate > 0.0) {
      theta = candidate;
    }
  }

  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = v[i] - theta;
    p[i] = x > 0.0 ? x : 0.0;
  }

  // Canonicalize: rewrite the largest coordinate as 1 minus the ascending
  // sum of the rest, so the ascending total is exactly one. A tie for the
  // largest entry can reshuffle the order, hence the short retry loop.
  for (int round = 0; round < 64; ++round) {
    Eigen::Index top = 0;
    p.maxCoeff(&top);
    double rest = 0.0;
    {
      std::vector<double> others;
      others.reserve(static_cast<size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != top && p[i] > 0.0) others.push_back(p[i]);
      }
      std::sort(others.begin(), others.end());
      for (double x : others) rest += x;
    }
    const double adjusted = 1.0 - rest;
    if (!(adjusted > 0.0)) {
      throw DegenerateInstance("simplex_project: canonicalization failed");
    }
    p[top] = adjusted;
    if (ascending_positive_sum(p) == 1.0) {
      return Histogram(std::move(p));
    }
  }
  return Histogram(std::move(p));
}

Histogram project_to_interior(const Eigen::VectorXd& v, double epsilon) {
  const Eigen::Index n = v.size();
  if (n == 0) {
    throw InvalidInput("project_to_interior: empty input");
  }
  const double floor_total = epsilon * static_cast<double>(n);
  if (!(epsilon > 0.0) || !(floor_total < 1.0)) {
    throw InvalidInput("project_to_interior: epsilon must lie in (0, 1/n)");
  }
  // Affine reduction to the plain simplex:
  //   p = eps + (1 - n*eps) * proj((v - eps) / (1 - n*eps)).
  const double scale = 1.0 - floor_total;
  const Eigen::VectorXd shifted = (v.array() - epsilon) / scale;
  const Histogram q = simplex_project(shifted);
  Eigen::VectorXd p = epsilon + scale * q.weights().array();
  return Histogram(std::move(p));
}

InteriorHistogram clip_to_interior(const Histogram& p, double epsilon) {
  const double n = static_cast<double>(p.size());
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / n)) {
    throw InvalidInput("clip_to_interior: epsilon must lie in (0, 1/n)");
  }
  if ((p.weights().array() >= epsilon).all()) {
    return InteriorHistogram(p, epsilon);
  }
  return InteriorHistogram(project_to_interior(p.weights(), epsilon), epsilon);
}

}  // namespace sharpot
