#include "sharpot/exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "sharpot/errors.hpp"

namespace sharpot {

namespace {

constexpr double kOptTol = 1e-12;   // reduced-cost optimality threshold
constexpr double kFeasTol = 1e-10;  // marginal residual contract of the oracle

// Transportation-simplex state. Rows are nodes 0..n-1, columns n..n+m-1;
// the basis is a spanning tree of the bipartite graph with n+m-1 edges.
struct Tableau {
  Eigen::Index n, m;
  const Eigen::MatrixXd& cost;
  Eigen::MatrixXd mass;
  std::vector<std::vector<bool>> basic;

  Tableau(const Eigen::MatrixXd& M, const Eigen::VectorXd& a,
          const Eigen::VectorXd& b)
      : n(M.rows()), m(M.cols()), cost(M), mass(Eigen::MatrixXd::Zero(n, m)),
        basic(static_cast<size_t>(n), std::vector<bool>(static_cast<size_t>(m), false)) {
    northwest_corner(a, b);
  }

  void northwest_corner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ra = a;
    Eigen::VectorXd cb = b;
    Eigen::Index i = 0, j = 0;
    while (true) {
      const double t = std::max(0.0, std::min(ra[i], cb[j]));
      mass(i, j) = t;
      basic[static_cast<size_t>(i)][static_cast<size_t>(j)] = true;
      ra[i] -= t;
      cb[j] -= t;
      if (i == n - 1 && j == m - 1) break;
      if (j == m - 1) {
        ++i;
      } else if (i == n - 1) {
        ++j;
      } else if (ra[i] <= cb[j]) {
        ++i;  // row exhausted (ties move down, deterministically)
      } else {
        ++j;
      }
    }
  }

  // Dual prices from u_i + v_j = M_ij over the basis tree, u_0 = 0.
  void compute_duals(Eigen::VectorXd& u, Eigen::VectorXd& v) const {
    u.setConstant(n, std::numeric_limits<double>::quiet_NaN());
    v.setConstant(m, std::numeric_limits<double>::quiet_NaN());
    u[0] = 0.0;
    std::deque<Eigen::Index> queue = {0};  // node ids: rows < n, cols >= n
    while (!queue.empty()) {
      const Eigen::Index node = queue.front();
      queue.pop_front();
      if (node < n) {
        const Eigen::Index i = node;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (basic[static_cast<size_t>(i)][static_cast<size_t>(j)] &&
              std::isnan(v[j])) {
            v[j] = cost(i, j) - u[i];
            queue.push_back(n + j);
          }
        }
      } else {
        const Eigen::Index j = node - n;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (basic[static_cast<size_t>(i)][static_cast<size_t>(j)] &&
              std::isnan(u[i])) {
            u[i] = cost(i, j) - v[j];
            queue.push_back(i);
          }
        }
      }
    }
  }

  // Unique tree path from column j_star to row i_star, returned as the list
  // of basic cells along it (first cell shares column j_star).
  std::vector<std::pair<Eigen::Index, Eigen::Index>> path_cells(
      Eigen::Index i_star, Eigen::Index j_star) const {
    const Eigen::Index total = n + m;
    std::vector<Eigen::Index> parent(static_cast<size_t>(total), -1);
    std::vector<bool> seen(static_cast<size_t>(total), false);
    std::deque<Eigen::Index> queue = {n + j_star};
    seen[static_cast<size_t>(n + j_star)] = true;
    while (!queue.empty()) {
      const Eigen::Index node = queue.front();
      queue.pop_front();
      if (node == i_star) break;
      if (node < n) {
        for (Eigen::Index j = 0; j < m; ++j) {
          if (basic[static_cast<size_t>(node)][static_cast<size_t>(j)] &&
              !seen[static_cast<size_t>(n + j)]) {
            seen[static_cast<size_t>(n + j)] = true;
            parent[static_cast<size_t>(n + j)] = node;
            queue.push_back(n + j);
          }
        }
      } else {
        const Eigen::Index j = node - n;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (basic[static_cast<size_t>(i)][static_cast<size_t>(j)] &&
              !seen[static_cast<size_t>(i)]) {
            seen[static_cast<size_t>(i)] = true;
            parent[static_cast<size_t>(i)] = node;
            queue.push_back(i);
          }
        }
      }
    }
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    Eigen::Index node = i_star;
    while (parent[static_cast<size_t>(node)] != -1) {
      const Eigen::Index up = parent[static_cast<size_t>(node)];
      const Eigen::Index i = node < n ? node : up;
      const Eigen::Index j = node < n ? up - n : node - n;
      cells.emplace_back(i, j);
      node = up;
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
  }
};

}  // namespace

ExactSolution exact_wasserstein(const Histogram& a, const Histogram& b,
                                const CostMatrix& M) {
  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  if (M.rows() != n || M.cols() != m) {
    throw InvalidInput("exact_wasserstein: cost matrix dimensions do not match");
  }
  if (n * m > 2500) {
    throw OutOfScale("exact_wasserstein: instance exceeds the n*m <= 2500 oracle scale");
  }

  Tableau tab(M.entries(), a.weights(), b.weights());
  Eigen::VectorXd u(n), v(m);

  const long pivot_cap = 1000L * static_cast<long>(n + m) * static_cast<long>(n + m);
  for (long pivot = 0;; ++pivot) {
    if (pivot > pivot_cap) {
      throw Error("exact_wasserstein: pivot limit exceeded");
    }
    tab.compute_duals(u, v);
    if (u.hasNaN() || v.hasNaN()) {
      throw Error("exact_wasserstein: basis lost its spanning tree");
    }

    // Bland's rule: the lexicographically first cell with negative reduced
    // cost enters; none means optimality.
    Eigen::Index ei = -1, ej = -1;
    for (Eigen::Index i = 0; i < n && ei < 0; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!tab.basic[static_cast<size_t>(i)][static_cast<size_t>(j)] &&
            M(i, j) - u[i] - v[j] < -kOptTol) {
          ei = i;
          ej = j;
          break;
        }
      }
    }
    if (ei < 0) break;

    const auto cells = tab.path_cells(ei, ej);
    if (cells.empty()) {
      throw Error("exact_wasserstein: basis lost its spanning tree");
    }
    // Alternating signs along the cycle: the entering cell takes +theta and
    // the path cells alternate starting with -. The leaving variable is the
    // lexicographically first minus-cell attaining the exact minimum.
    double theta = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < cells.size(); k += 2) {
      theta = std::min(theta, tab.mass(cells[k].first, cells[k].second));
    }
    theta = std::max(0.0, theta);
    Eigen::Index li = -1, lj = -1;
    for (size_t k = 0; k < cells.size(); k += 2) {
      const auto [ci, cj] = cells[k];
      if (tab.mass(ci, cj) <= theta &&
          (li < 0 || ci < li || (ci == li && cj < lj))) {
        li = ci;
        lj = cj;
      }
    }

    tab.mass(ei, ej) += theta;
    tab.basic[static_cast<size_t>(ei)][static_cast<size_t>(ej)] = true;
    for (size_t k = 0; k < cells.size(); ++k) {
      const auto [ci, cj] = cells[k];
      if (k % 2 == 0) {
        tab.mass(ci, cj) = std::max(0.0, tab.mass(ci, cj) - theta);
      } else {
        tab.mass(ci, cj) += theta;
      }
    }
    tab.mass(li, lj) = 0.0;
    tab.basic[static_cast<size_t>(li)][static_cast<size_t>(lj)] = false;
  }

  const double value = (tab.mass.array() * M.entries().array()).sum();

  // Optimality certificate: feasibility plus complementary slackness
  // against the recovered prices.
  bool certified = marginal_violation(tab.mass, a.weights(), b.weights()) <= kFeasTol;
  tab.compute_duals(u, v);
  for (Eigen::Index i = 0; i < n && certified; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double reduced = M(i, j) - u[i] - v[j];
      if (reduced < -1e-9 || (tab.mass(i, j) > 0.0 && std::abs(reduced) > 1e-9)) {
        certified = false;
        break;
      }
    }
  }

  TransportPlan plan(tab.mass, a, b, kFeasTol);
  return ExactSolution{value, std::move(plan), certified};
}

double wasserstein_1d(const std::vector<double>& xs, const Histogram& a,
                      const std::vector<double>& ys, const Histogram& b) {
  if (static_cast<Eigen::Index>(xs.size()) != a.size() ||
      static_cast<Eigen::Index>(ys.size()) != b.size()) {
    throw InvalidInput("wasserstein_1d: point and weight counts differ");
  }
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidInput("wasserstein_1d: non-finite point");
  }
  for (double y : ys) {
    if (!std::isfinite(y)) throw InvalidInput("wasserstein_1d: non-finite point");
  }

  // Sweep the merged support; between consecutive positions the CDF
  // difference is constant, so W1 = sum |Fa - Fb| * dx.
  struct Event {
    double pos;
    double da;
    double db;
  };
  std::vector<Event> events;
  events.reserve(xs.size() + ys.size());
  for (size_t i = 0; i < xs.size(); ++i) events.push_back({xs[i], a[static_cast<Eigen::Index>(i)], 0.0});
  for (size_t j = 0; j < ys.size(); ++j) events.push_back({ys[j], 0.0, b[static_cast<Eigen::Index>(j)]});
  std::sort(events.begin(), events.end(),
            [](const Event& l, const Event& r) { return l.pos < r.pos; });

  double w = 0.0;
  double fa = 0.0, fb = 0.0;
  for (size_t k = 0; k < events.size(); ++k) {
    if (k > 0) {
      w += std::abs(fa - fb) * (events[k].pos - events[k - 1].pos);
    }
    fa += events[k].da;
    fb += events[k].db;
  }
  return w;
}

}  // namespace sharpot
