#pragma once

#include <vector>

#include <Eigen/Core>

#include "sharpot/types.hpp"

namespace sharpot {

/// Exact optimum of the transport linear program. The plan is a vertex of
/// the transportation polytope (at most n+m-1 nonzeros); `certificate` is
/// true when feasibility and complementary slackness against the recovered
/// dual prices were verified.
struct ExactSolution {
  double value;
  TransportPlan plan;
  bool certificate;
};

/// Exact small-instance Wasserstein oracle: solves min_{T in Pi(a,b)} <T, M>
/// by the transportation simplex with Bland's rule. Requires n*m <= 2500.
ExactSolution exact_wasserstein(const Histogram& a, const Histogram& b,
                                const CostMatrix& M);

/// Closed-form 1-D Wasserstein distance with cost |x - y|: the L1 distance
/// between the cumulative distribution functions. Independent cross-check
/// for the LP solver. Points need not be sorted.
double wasserstein_1d(const std::vector<double>& xs, const Histogram& a,
                      const std::vector<double>& ys, const Histogram& b);

}  // namespace sharpot
