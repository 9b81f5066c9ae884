#pragma once

#include <Eigen/Core>

#include "sharpot/types.hpp"

namespace sharpot {

/// Euclidean projection onto the probability simplex by sort-and-threshold.
/// The output is canonical: re-projecting it returns it bit-for-bit.
Histogram simplex_project(const Eigen::VectorXd& v);

/// Euclidean projection onto the interior simplex {p : p_i >= epsilon,
/// sum p = 1}. Requires 0 < epsilon < 1/n.
Histogram project_to_interior(const Eigen::VectorXd& v, double epsilon);

/// Moves a histogram into the interior simplex, renormalizing the mass that
/// the epsilon floor displaces (the one place the library renormalizes).
/// Idempotent on inputs that already satisfy p_i >= epsilon.
InteriorHistogram clip_to_interior(const Histogram& p, double epsilon);

}  // namespace sharpot
