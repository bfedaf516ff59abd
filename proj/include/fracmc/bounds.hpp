#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fracmc/problem.hpp"

namespace fracmc {

/// Free parameters of the terminal-state tail bound
///   P[|X_{T_t}^x| > u] <= M2_tail u^{-beta}  for u > M0.
struct TailBoundParams {
  double epsilon;  // slack above the exact tail constant
  double S;        // partition parameter; default minimizes the prefactor
  double M0;       // threshold above which the bound applies
  double delta;    // growth margin: |phi(x)| <= |x|^(beta/(delta+2))

  /// epsilon = 0.01 C_beta sigma^beta, S = ln2/beta (prefactor minimizer),
  /// M0 = max(2|x| + 2 abar^(alpha/beta), sqrt(d)*10), delta from phi_growth
  /// when available (delta = beta/growth - 2), else 1.
  static TailBoundParams defaults(const ProblemSpec& problem);
};

/// Every explicit constant of the error analysis for one problem instance.
struct BoundsReport {
  double c_beta = 0.0;
  double m1_tail = 0.0;        // M^(1)
  double m2_tail = 0.0;        // M^(2)
  double phi_sq_bound = 0.0;   // bound on E[phi(X_T)^2]
  double m2_const = 0.0;       // M_2, per-coordinate 2gamma-moment sum
  double var_bound = 0.0;      // M^1_{t,x}
  double bias_const = 0.0;     // M^2_{t,x}, coefficient of h^(gamma/beta)
  double bias2_const = 0.0;    // M^3_{t,x}, coefficient of h^(2gamma/beta)
  double z_sq_bound = 0.0;     // bound on E[Z^2]
  double l2_bound = 0.0;       // at the (n, h) the report was built for
  std::int64_t n = 0;
  double h = 0.0;

  static std::string csv_header();
  std::string csv_row(const std::string& fingerprint) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// E|U_t|^eta for the symmetric beta-stable one-dim marginal with
/// E[exp(izU_t)] = exp(-t c |z|^beta):
///   (t c)^(eta/beta) 2^eta Gamma((1+eta)/2) Gamma(1-eta/beta)
///     / (sqrt(pi) Gamma(1-eta/2)).
/// Requires -1 < eta < beta.
double frac_moment_stable(double eta, double beta, double c, double t);

/// E[tau_1^eta] = Gamma(1-eta/alpha)/Gamma(1-eta) for eta < alpha; negative
/// eta of any magnitude is fine.
double frac_moment_subordinator(double eta, double alpha);

/// E[T_t^k] = abar^(k alpha) Gamma(1+k)/Gamma(1+k alpha); 0 when abar = 0
/// and k > 0.  Guarded below k = -1/alpha and at Gamma poles.
double hitting_time_moment(double k, double alpha, double abar);

/// One-dim stable tail constant
///   C_beta = (1-beta) / (Gamma(2-beta) cos(pi beta / 2)),
/// evaluated in the pole-free form centered at beta = 1 (value 2/pi there).
double c_beta(double beta);

/// M^(1) = (1 + 2 e^(2 beta S)/(e^(beta S)-1)) d^(1+beta/2)
///           (epsilon + C_beta sigma^beta) + 1,
/// M^(2) = 2 abar^(-alpha/beta) M^(1).
struct TailConstants {
  double m1;
  double m2;
};
TailConstants tail_constants(const StableSpec& stable,
                             const TailBoundParams& params, double alpha,
                             double abar);

/// Bound on E[phi(X_T)^2] when |phi(x)| <= |x|^(beta/(delta+2)):
///   M0 + 2 M^(2) M0^(-delta/2) / delta.
double phi_second_moment_bound(const TailBoundParams& params, double m2_tail);

/// M_2 = d c^(2gamma/beta) 2^(2gamma) Gamma((1+2gamma)/2)
///         Gamma(1-2gamma/beta) / (sqrt(pi) Gamma(1-gamma)); needs 2gamma < beta.
double m2_constant(const StableSpec& stable, double gamma);

/// M^1_{t,x}: phi_sq_bound + B + sqrt(phi_sq_bound * B) with
/// B = d L^2 M_2 / (1+gamma/beta)^2 * E[(T_t+1)^3], the cube expanded
/// through the hitting-time moments.
double variance_bound(const ProblemSpec& problem, double phi_sq_bound);

/// |E[Z - Y_h]| <= M_3 h + K h^(1+gamma/beta) + M^2_{t,x} h^(gamma/beta)
/// with K = L d c^(gamma/beta) 2^gamma Gamma((1+gamma)/2) Gamma(1-gamma/beta)
///            / ((1+gamma/beta) sqrt(pi) Gamma(1-gamma/2))
/// and M^2_{t,x} = K abar^alpha Gamma(2)/Gamma(1+alpha).
double bias_bound(const ProblemSpec& problem, double h, double m3);
double bias_bound_coefficient(const ProblemSpec& problem);  // M^2_{t,x}

/// E|Y_h - Z|^2 <= 2 h g_terminal_sq
///                + 2 L^2 d M_2 h^(1+2gamma/beta) / (1+2gamma/beta)
///                + L^2 E[T_t^2] M_2 h^(2gamma/beta).
/// g_terminal_sq bounds E[g(X_T)^2].
double bias_sq_bound(const ProblemSpec& problem, double h,
                     double g_terminal_sq);
double bias_sq_bound_coefficient(const ProblemSpec& problem);  // M^3_{t,x}

/// E[Z^2] <= 2 phi_sq_bound + 4 (E[T_t^2] g(x)^2
///            + L^2 d M_2 E[T_t^(2+2gamma/beta)] / (1+2gamma/beta)).
double z_second_moment_bound(const ProblemSpec& problem, double phi_sq_bound);

/// E[(u - u_N^h)^2] <= var_bound/n + bias_const^2 h^(2gamma/beta).
double l2_error_bound(std::int64_t n, double h, double var_bound,
                      double bias_const, double gamma, double beta);

/// Markov-inequality interval: half-width sqrt(l2 / (1-level)).
Interval markov_ci(double estimate, double l2, double level);

/// CLT interval: estimate +- m_tx z((1-level)/2) / sqrt(n) with m_tx an
/// upper bound on sqrt(Var Z).
Interval asymptotic_ci(double estimate, double m_tx, std::int64_t n,
                       double level);

/// 0.433 ||psi'''|| rho / (sqrt(n) sigma^3).
double berry_esseen_bound(double rho, double sigma, std::int64_t n,
                          double psi3_sup);

/// Exact E[g(X_T)] and E[g(X_T)^2] for catalog power-law forcings at x = 0,
/// triangle-inequality bounds otherwise; std::nullopt for opaque g.
std::optional<double> forcing_mean_bound(const ProblemSpec& problem);
std::optional<double> forcing_sq_bound(const ProblemSpec& problem);

/// Closed-form u(t,x) for catalog problems at x = 0:
///   phi part  kappa abar^(alpha eta/beta) E[tau^(-alpha eta/beta)] E|X_1|^eta
///   g part    kappa E|X_1|^eta E[T^(1+eta/beta)] / (1+eta/beta).
std::optional<double> closed_form_reference(const ProblemSpec& problem);

/// Exact E[phi(X_T)^2] for catalog power-law phi at x = 0 (2 eta < beta),
/// else the tail-based phi_second_moment_bound.
double phi_sq_bound_auto(const ProblemSpec& problem,
                         const TailBoundParams& params);

/// Assembles every constant for one problem at the given (n, h).
BoundsReport make_bounds_report(const ProblemSpec& problem,
                                const TailBoundParams& params, std::int64_t n,
                                double h);

}  // namespace fracmc
