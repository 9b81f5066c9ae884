#include "sharpot/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sharpot/errors.hpp"
#include "sharpot/simplex.hpp"

namespace sharpot {

double gaussian_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidInput("gaussian_kernel: sigma must be positive");
  }
  if (x.size() != y.size()) {
    throw InvalidInput("gaussian_kernel: dimension mismatch");
  }
  return std::exp(-(x - y).squaredNorm() / sigma);
}

void TrainingSet::validate() const {
  if (inputs.rows() < 1) {
    throw InvalidInput("TrainingSet: need at least one example");
  }
  if (!inputs.allFinite()) {
    throw InvalidInput("TrainingSet: non-finite input");
  }
  if (outputs.size() != static_cast<size_t>(inputs.rows())) {
    throw InvalidInput("TrainingSet: input/output count mismatch");
  }
  const Eigen::Index n = outputs.front().size();
  for (const auto& y : outputs) {
    if (y.size() != n) {
      throw InvalidInput("TrainingSet: outputs must share a common length");
    }
  }
}

WeightModel::WeightModel(double sigma, double gamma, Eigen::MatrixXd inputs)
    : sigma_(sigma), gamma_(gamma), inputs_(std::move(inputs)) {
  if (!(sigma_ > 0.0)) {
    throw InvalidInput("WeightModel: sigma must be positive");
  }
  if (!(gamma_ > 0.0)) {
    throw InvalidInput("WeightModel: gamma must be positive");
  }
  if (inputs_.rows() < 1 || !inputs_.allFinite()) {
    throw InvalidInput("WeightModel: invalid training inputs");
  }
  const Eigen::Index l = inputs_.rows();
  Eigen::MatrixXd k(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    k(i, i) = 1.0;  // exp(0)
    for (Eigen::Index j = i + 1; j < l; ++j) {
      const double v = gaussian_kernel(inputs_.row(i), inputs_.row(j), sigma_);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  k.diagonal().array() += gamma_ * static_cast<double>(l);
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw Error("WeightModel: factorization of K + gamma*l*I failed");
  }
  factor_ = llt.matrixL();
}

WeightModel WeightModel::from_factor(double sigma, double gamma,
                                     Eigen::MatrixXd inputs,
                                     Eigen::MatrixXd factor) {
  if (factor.rows() != inputs.rows() || factor.cols() != inputs.rows()) {
    throw InvalidInput("WeightModel: factor dimensions do not match inputs");
  }
  WeightModel m;
  m.sigma_ = sigma;
  m.gamma_ = gamma;
  m.inputs_ = std::move(inputs);
  m.factor_ = std::move(factor);
  return m;
}

Eigen::VectorXd WeightModel::evaluation_vector(const Eigen::VectorXd& x) const {
  Eigen::VectorXd kx(inputs_.rows());
  for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
    kx[i] = gaussian_kernel(x, inputs_.row(i), sigma_);
  }
  return kx;
}

Eigen::VectorXd WeightModel::solve(const Eigen::VectorXd& rhs) const {
  const Eigen::VectorXd y =
      factor_.triangularView<Eigen::Lower>().solve(rhs);
  return factor_.transpose().triangularView<Eigen::Upper>().solve(y);
}

WeightModel fit(const TrainingSet& train, double sigma, double gamma) {
  train.validate();
  return WeightModel(sigma, gamma, train.inputs);
}

Eigen::VectorXd scores(const WeightModel& model, const Eigen::VectorXd& x) {
  return model.solve(model.evaluation_vector(x));
}

Prediction predict(const WeightModel& model, const Eigen::VectorXd& x,
                   const std::vector<InteriorHistogram>& outputs, Metric metric,
                   double lambda, const CostMatrix& M, const DescentConfig& cfg) {
  if (outputs.empty() || outputs.size() != static_cast<size_t>(model.count())) {
    throw InvalidInput("predict: output count does not match the model");
  }
  const Eigen::Index n = outputs.front().size();
  if (M.rows() != n || M.cols() != n) {
    throw InvalidInput("predict: cost matrix must match the output support");
  }

  const Eigen::VectorXd alpha = scores(model, x);

  BarycenterProblem prob;
  prob.support_size = n;
  prob.weights = alpha;
  prob.relaxed = true;
  prob.measures.reserve(outputs.size());
  prob.costs.reserve(outputs.size());
  for (const auto& y : outputs) {
    prob.measures.push_back(y.histogram());
    prob.costs.push_back(M);
  }

  DescentConfig dcfg = cfg;
  if (dcfg.epsilon <= 0.0) {
    dcfg.epsilon = 1e-6 / static_cast<double>(n);
  }

  // Initialize at the score-weighted average of the training outputs,
  // projected into the interior; fall back to uniform when every score is
  // nonpositive.
  Histogram init = Histogram::uniform(n);
  if ((alpha.array() > 0.0).any()) {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < outputs.size(); ++i) {
      avg += alpha[static_cast<Eigen::Index>(i)] * outputs[i].weights();
    }
    init = project_to_interior(avg, dcfg.epsilon);
  }

  DescentOutcome out = barycenter_descent(prob, lambda, init, dcfg, metric);
  return Prediction{InteriorHistogram(std::move(out.best), dcfg.epsilon),
                    out.stalled};
}

std::pair<double, double> cross_validate(const TrainingSet& train,
                                         const std::vector<double>& sigma_grid,
                                         const std::vector<double>& gamma_grid,
                                         int folds, Metric metric, double lambda,
                                         const CostMatrix& M,
                                         const DescentConfig& cfg,
                                         std::uint64_t seed) {
  train.validate();
  if (sigma_grid.empty() || gamma_grid.empty()) {
    throw InvalidInput("cross_validate: empty parameter grid");
  }
  if (folds < 2) {
    throw InvalidInput("cross_validate: need at least two folds");
  }
  const Eigen::Index l = train.count();
  if (l < folds) {
    throw InvalidInput("cross_validate: more folds than examples");
  }

  // Deterministic fold assignment: a seeded shuffle dealt round-robin.
  std::vector<Eigen::Index> order(static_cast<size_t>(l));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(static_cast<size_t>(l));
  for (size_t pos = 0; pos < order.size(); ++pos) {
    fold_of[static_cast<size_t>(order[pos])] = static_cast<int>(pos % static_cast<size_t>(folds));
  }

  SinkhornConfig loss_cfg = cfg.solver;
  loss_cfg.lambda = lambda;
  loss_cfg.log_domain = loss_cfg.log_domain || recommend_log_domain(M, lambda);

  double best_loss = std::numeric_limits<double>::infinity();
  std::pair<double, double> best{sigma_grid.front(), gamma_grid.front()};
  for (double sigma : sigma_grid) {
    for (double gamma : gamma_grid) {
      double total = 0.0;
      Eigen::Index held_out = 0;
      for (int f = 0; f < folds; ++f) {
        Eigen::MatrixXd sub_inputs(l, train.inputs.cols());
        std::vector<InteriorHistogram> sub_outputs;
        Eigen::Index rows = 0;
        for (Eigen::Index i = 0; i < l; ++i) {
          if (fold_of[static_cast<size_t>(i)] != f) {
            sub_inputs.row(rows++) = train.inputs.row(i);
            sub_outputs.push_back(train.outputs[static_cast<size_t>(i)]);
          }
        }
        TrainingSet sub{sub_inputs.topRows(rows), std::move(sub_outputs)};
        const WeightModel model = fit(sub, sigma, gamma);
        for (Eigen::Index i = 0; i < l; ++i) {
          if (fold_of[static_cast<size_t>(i)] != f) continue;
          const Prediction pred = predict(model, train.inputs.row(i), sub.outputs,
                                          metric, lambda, M, cfg);
          total += sharp_distance(pred.histogram.histogram(),
                                  train.outputs[static_cast<size_t>(i)].histogram(),
                                  M, loss_cfg);
          ++held_out;
        }
      }
      const double mean_loss = total / static_cast<double>(held_out);
      if (mean_loss < best_loss) {
        best_loss = mean_loss;
        best = {sigma, gamma};
      }
    }
  }
  return best;
}

}  // namespace sharpot
