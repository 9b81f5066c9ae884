#include "sharpot/rate_study.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "sharpot/costs.hpp"
#include "sharpot/errors.hpp"
#include "sharpot/exact.hpp"
#include "sharpot/io.hpp"

namespace sharpot {

std::vector<RateStudyRecord> run_rate_study(const Histogram& a, const Histogram& b,
                                            const CostMatrix& M,
                                            const std::vector<double>& lambdas,
                                            const SinkhornConfig& base_cfg) {
  const double exact_value = exact_wasserstein(a, b, M).value;

  std::vector<RateStudyRecord> records;
  records.reserve(lambdas.size());
  for (double lambda : lambdas) {
    SinkhornConfig cfg = base_cfg;
    cfg.lambda = lambda;
    cfg.log_domain = base_cfg.log_domain || recommend_log_domain(M, lambda);
    try {
      const SinkhornSolution sol = sinkhorn_solve(a, b, M, cfg);
      const double transport =
          (sol.plan.entries().array() * M.entries().array()).sum();
      const double regularized = transport - entropy(sol.plan) / lambda;
      records.push_back(RateStudyRecord{lambda, std::abs(transport - exact_value),
                                        std::abs(regularized - exact_value),
                                        sol.iterations});
    } catch (const Error&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      records.push_back(RateStudyRecord{lambda, nan, nan, -1});
    }
  }
  return records;
}

void write_rate_study_csv(std::ostream& out,
                          const std::vector<RateStudyRecord>& records) {
  out << "lambda,sharp_gap,regularized_gap,iterations\n";
  for (const auto& rec : records) {
    out << format_double(rec.lambda) << ',' << format_double(rec.sharp_gap) << ','
        << format_double(rec.regularized_gap) << ',' << rec.iterations << '\n';
  }
}

}  // namespace sharpot
