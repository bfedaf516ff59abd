#pragma once

#include <span>
#include <vector>

#include "fracmc/rng.hpp"

namespace fracmc {

/// Index of the one-sided stable subordinator driving the time change.
/// Normalization: E[exp(-u tau_1)] = exp(-u^alpha).
struct SubordinatorSpec {
  double alpha;  // strictly inside (0,1); alpha = 1 is the excluded drift case
  void validate() const;
};

/// Spatial isotropic beta-stable process.  Each component is symmetric with
/// E[exp(i z X_(j))] = exp(-c |z|^beta); the scale sigma of the one-dim
/// S_beta(sigma, 0, 0) parametrization satisfies sigma^beta = c.
struct StableSpec {
  double beta;  // in (0, 2]
  double c;     // component scale exponent, > 0
  int d;        // dimension, >= 1
  double sigma() const;
  void validate() const;
};

/// Evaluation window [a, t]; abar = t - a is always derived, never stored.
struct TimeWindow {
  double a;
  double t;
  double abar() const { return t - a; }
  void validate() const;
};

/// One draw of tau_1 (Kanter's exact representation):
///   tau_1 = (A(U)/E)^((1-alpha)/alpha),
///   A(u)  = [sin(alpha u)^alpha sin((1-alpha)u)^(1-alpha) / sin(u)]^(1/(1-alpha)),
/// with U uniform on (0,pi) and E unit exponential.  Consumes 2 uniforms.
double sample_subordinator_unit(const SubordinatorSpec& spec, RngStream& rng);

/// One draw of the hitting time T_t = (abar / tau_1)^alpha; exactly 0 when
/// abar = 0.  Consumes 2 uniforms.
double sample_hitting_time(const SubordinatorSpec& spec, const TimeWindow& win,
                           RngStream& rng);

/// One scalar increment over time dt, characteristic function
/// exp(-dt c |z|^beta).  Chambers-Mallows-Stuck in the symmetric form
///   X = (c dt)^(1/beta) sin(beta V)/(cos V)^(1/beta)
///       * (cos((1-beta)V)/E)^((1-beta)/beta),
/// V uniform on (-pi/2, pi/2), E unit exponential; beta = 2 short-circuits
/// to Box-Muller with variance 2 c dt.  Consumes 2 uniforms either way.
double sample_symmetric_stable(const StableSpec& spec, double dt,
                               RngStream& rng);

/// d iid symmetric component draws; consumes 2d uniforms.
void sample_isotropic_vector(const StableSpec& spec, double dt, RngStream& rng,
                             std::span<double> out);
std::vector<double> sample_isotropic_vector(const StableSpec& spec, double dt,
                                            RngStream& rng);

/// Path-free draw of the terminal state X_{T_t}^x = x + T_t^(1/beta) X_1.
/// Draw order within the stream: tau_1 first, then the d components of X_1.
void sample_terminal_state(const StableSpec& stable,
                           const SubordinatorSpec& sub, const TimeWindow& win,
                           std::span<const double> x, RngStream& rng,
                           std::span<double> out);
std::vector<double> sample_terminal_state(const StableSpec& stable,
                                          const SubordinatorSpec& sub,
                                          const TimeWindow& win,
                                          std::span<const double> x,
                                          RngStream& rng);

}  // namespace fracmc
