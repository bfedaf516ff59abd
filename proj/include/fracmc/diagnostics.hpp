#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fracmc/estimator.hpp"
#include "fracmc/problem.hpp"

namespace fracmc {

/// Log-log tail regression result.  slope estimates minus the tail index.
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  int n_points = 0;
  std::vector<double> thresholds;  // for CSV output
  std::vector<double> survival;
};

/// OLS of log empirical survival against log threshold, over n_points
/// log-spaced thresholds between the q_lo and q_hi empirical quantiles.
/// Needs at least 1e4 samples and 0.9 <= q_lo < q_hi < 1; throws
/// std::invalid_argument when the tail is degenerate (all samples equal or
/// fewer than 5 usable points).
TailFit fit_tail_exponent(std::span<const double> samples, double q_lo = 0.99,
                          double q_hi = 0.9999, int n_points = 40);

/// One replication study of the normalized estimator.
struct CltReport {
  std::int64_t replications = 0;
  std::int64_t n_per_rep = 0;
  double h = 0.0;
  std::vector<double> standardized;  // sqrt(n)(u_r - u_ref)/pooled_sd
  std::vector<char> covered;         // per replication, at `level`
  double pooled_sd = 0.0;
  double normality_stat = 0.0;
  double normality_pvalue = 0.0;
  double empirical_coverage = 0.0;
  double level = 0.0;
  double reference = 0.0;
};

/// Runs `reps` independent estimates of size n (stream ids r*n + k),
/// standardizes by the pooled streaming standard deviation, tests
/// normality by Kolmogorov-Smirnov and measures the empirical coverage of
/// the asymptotic interval built from the pooled sd.  The reference value
/// must be supplied or derivable in closed form from the catalog metadata;
/// a constant-phi, g = 0 configuration is rejected as degenerate.
CltReport clt_replication(const ProblemSpec& problem, std::int64_t n,
                          std::int64_t reps, std::uint64_t seed, double level,
                          double h = 0.0,
                          std::optional<double> reference = std::nullopt);

/// Coverage of the same replication set at a different level (uses the
/// stored standardized values; monotone in level by construction).
double coverage_at(const CltReport& report, double level);

struct BerryEsseenPoint {
  std::int64_t n = 0;
  double lhs = 0.0;     // |mean_r sin(S_n)|  (E[sin W] = 0)
  double lhs_se = 0.0;  // replication standard error of the mean
  double rhs = 0.0;     // 0.433 rho_hat / (sqrt(n) sigma_hat^3)
};

struct BerryEsseenResult {
  double sigma_hat = 0.0;  // from the calibration run
  double rho_hat = 0.0;    // two-pass third absolute central moment
  std::vector<BerryEsseenPoint> points;
};

/// Empirical check of the smooth-test-function CLT rate with psi = sin
/// (third-derivative sup exactly 1).  sigma and rho come from a dedicated
/// calibration run of calib_n samples; each grid point runs `reps`
/// replications of size n.  Requires the phi growth hypothesis
/// phi_growth < beta/3 and g = 0.
BerryEsseenResult berry_esseen_check(const ProblemSpec& problem,
                                     std::span<const std::int64_t> n_grid,
                                     std::int64_t reps, std::uint64_t seed,
                                     std::int64_t calib_n = 1000000);

struct ScalingPoint {
  double abar = 0.0;
  double estimate = 0.0;
  double stderr_mean = 0.0;
  double ratio = 0.0;  // estimate / abar^exponent
};

/// Sweeps the window length over abar_grid and reports the estimate scaled
/// by abar^exponent; h = 0 runs the path-free estimator.
std::vector<ScalingPoint> scaling_check(const ProblemSpec& problem_template,
                                        std::span<const double> abar_grid,
                                        double exponent, std::int64_t n,
                                        double h, std::uint64_t seed,
                                        int workers = 0);

struct BiasDecayPoint {
  double h = 0.0;
  double mean_abs = 0.0;  // E|Y_h - Y_href|
  double se_abs = 0.0;
  double mean_sq = 0.0;  // E|Y_h - Y_href|^2
  double se_sq = 0.0;
};

struct BiasDecayResult {
  double slope = 0.0;     // log mean_abs vs log h
  double slope_sq = 0.0;  // log mean_sq vs log h
  bool exact_agreement = false;  // g = 0: differences identically zero
  std::vector<BiasDecayPoint> points;
};

/// Coupled common-random-numbers bias decay: each sample realizes one path
/// on the h_ref grid and every coarse Riemann sum reads that same path, so
/// Y_h - Y_href has no phi term and small variance.  h_grid entries must be
/// integer multiples of h_ref with h_ref < min(h_grid)/10; coupled = false
/// is a configuration error (the check is meaningless without coupling).
BiasDecayResult bias_decay_check(const ProblemSpec& problem,
                                 std::span<const double> h_grid, double h_ref,
                                 std::int64_t n, std::uint64_t seed,
                                 bool coupled = true);

/// Running-mean trajectory at geometric checkpoints (SLLN diagnostics);
/// returns (checkpoint n, running mean, running stderr).
struct RunningMeanPoint {
  std::int64_t n;
  double mean;
  double stderr_mean;
};
std::vector<RunningMeanPoint> running_mean_trajectory(
    const ProblemSpec& problem, std::int64_t n, double h, std::uint64_t seed,
    std::span<const std::int64_t> checkpoints);

}  // namespace fracmc
