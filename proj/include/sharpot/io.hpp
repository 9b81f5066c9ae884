#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sharpot/learning.hpp"
#include "sharpot/types.hpp"

namespace sharpot {

/// Formats a double with 12 significant digits, the library-wide CSV
/// precision: written values re-parse within 1e-12 relative.
std::string format_double(double v);

/// Histograms are a single CSV line of comma-separated decimals, or a JSON
/// object {"weights": [...]} when the path ends in .json.
Histogram read_histogram(const std::string& path);
void write_histogram(const std::string& path, const Histogram& h);

/// Matrices are one CSV row per line, or JSON {"entries": [[...]]} with
/// optional consistency fields "n" and "m".
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);

/// One histogram per CSV line (or JSON array of weight arrays).
std::vector<Histogram> read_histogram_rows(const std::string& path);
void write_histogram_rows(const std::string& path, const std::vector<Histogram>& rows);

/// Model file: magic line "SHARPOT-MODEL-1", one JSON header line, then a
/// little-endian float64 payload holding the training inputs, the training
/// outputs and the Cholesky factor of K + gamma*l*I.
struct StoredModel {
  WeightModel model;
  std::vector<InteriorHistogram> outputs;
};

void save_model(const std::string& path, const WeightModel& model,
                const std::vector<InteriorHistogram>& outputs);
StoredModel load_model(const std::string& path);

}  // namespace sharpot
