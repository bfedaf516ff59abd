#pragma once

#include "fracmc/problem.hpp"

namespace fracmc {

/// Built-in problem catalog.  All instances use d = 1, alpha = 1/2,
/// beta = 3/2, c = 1, x = 0 unless changed by the caller afterwards.
namespace catalog {

/// phi(x) = kappa |x|^eta as a Field (Euclidean norm).
Field power_field(double kappa, double eta);
Field constant_field(double value);

/// g = 0, phi(x) = |x|^(1/2): the unbiased-estimator study problem.
ProblemSpec unbiased_sqrt(double abar = 1.0);

/// g = 0, phi(x) = |x|^(2/5): satisfies the third-moment growth hypothesis
/// phi = O(|x|^(beta/(3+delta))), used by the Berry-Esseen diagnostics.
ProblemSpec unbiased_two_fifths(double abar = 1.0);

/// phi(x) = |x|^(1/2), g(x) = |x|^(1/2): the stepped-estimator study problem.
ProblemSpec forced_sqrt(double abar = 1.0);

/// phi == 0, g(x) = |x|^(1/2): the forcing term alone (scaling study).
ProblemSpec forcing_only(double abar = 1.0);

/// phi == 1, g(x) = |x|^(1/2): the confidence-interval study problem.
ProblemSpec ci_study(double abar = 1.0);

}  // namespace catalog

}  // namespace fracmc
