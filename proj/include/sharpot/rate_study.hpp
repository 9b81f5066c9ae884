#pragma once

#include <iosfwd>
#include <vector>

#include "sharpot/sinkhorn.hpp"
#include "sharpot/types.hpp"

namespace sharpot {

/// One row of the convergence-rate study: absolute gaps of the two Sinkhorn
/// distances to the exact Wasserstein value at a given lambda. Rows whose
/// solve failed carry NaN gaps and iterations = -1.
struct RateStudyRecord {
  double lambda;
  double sharp_gap;
  double regularized_gap;
  int iterations;

  bool failed() const { return iterations < 0; }
};

/// Computes the exact value once, then both gaps per lambda. Solver failures
/// are recorded as sentinel rows rather than aborting the study.
std::vector<RateStudyRecord> run_rate_study(const Histogram& a, const Histogram& b,
                                            const CostMatrix& M,
                                            const std::vector<double>& lambdas,
                                            const SinkhornConfig& base_cfg);

/// CSV with header `lambda,sharp_gap,regularized_gap,iterations`.
void write_rate_study_csv(std::ostream& out,
                          const std::vector<RateStudyRecord>& records);

}  // namespace sharpot
