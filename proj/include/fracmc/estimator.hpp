#pragma once

#include <cstdint>
#include <string>

#include "fracmc/moments.hpp"
#include "fracmc/problem.hpp"
#include "fracmc/rng.hpp"

namespace fracmc {

/// Aggregated estimate with streaming moments.  h = 0 encodes the g = 0
/// estimator (no Riemann sum); variance and stderr are derived accessors.
struct EstimateResult {
  double mean = 0.0;
  double m2 = 0.0;    // sum of squared deviations
  double m3 = 0.0;    // third central moment sum
  double abs3 = 0.0;  // running sum |y - running mean|^3 (diagnostic)
  std::int64_t n = 0;
  double h = 0.0;
  std::int64_t max_path_len = 0;
  std::uint64_t seed = 0;

  double variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
  double stderr_mean() const;

  /// Flat record, frozen column order:
  /// alpha,beta,gamma,d,abar,x...,h,n,mean,variance,stderr,max_path_len,seed
  static std::string csv_header(int d);
  std::string csv_row(const ProblemSpec& problem) const;
};

/// Riemann-sum endpoint convention for the forcing term.  The estimator
/// definition indexes g at t_i = (i-1)h (state before the i-th increment);
/// the walk-then-accumulate variant evaluates after the increment and is
/// kept behind this switch for comparison.
enum class EndpointRule { left, right };

/// One sample of the g = 0 estimator: phi(x + T_t^{1/beta} X_1).
/// Consumes 2 + 2d uniforms (tau, then the isotropic vector).
double sample_Y(const ProblemSpec& problem, RngStream& rng);

/// One sample of the stepped estimator: walks floor(T_t/h) increments of
/// span h, accumulating h*g at the configured endpoint, applies the final
/// partial increment with a fresh variate and adds phi at the terminal
/// state.  O(d) memory regardless of path length.
/// Draw order: tau, then one isotropic vector per full step, then the
/// fresh partial-step vector.
double sample_Yh(const ProblemSpec& problem, double h, RngStream& rng,
                 std::int64_t* path_len = nullptr,
                 EndpointRule rule = EndpointRule::left);

/// Averages n independent samples, one RngStream per sample index
/// (stream_id = stream_offset + k), reduced over fixed-size blocks that are
/// merged in ascending block order, so the result is bit-identical for
/// every worker count.  h = 0 runs sample_Y, h > 0 runs sample_Yh.
/// workers = 0 uses all available threads.
EstimateResult estimate(const ProblemSpec& problem, std::int64_t n, double h,
                        std::uint64_t seed, int workers = 0,
                        EndpointRule rule = EndpointRule::left,
                        std::uint64_t stream_offset = 0);

/// Plain single-loop reference implementation (no blocking, no OpenMP),
/// kept for testing and benchmarking against the parallel kernel.
EstimateResult estimate_serial_reference(const ProblemSpec& problem,
                                         std::int64_t n, double h,
                                         std::uint64_t seed,
                                         EndpointRule rule = EndpointRule::left,
                                         std::uint64_t stream_offset = 0);

/// Step-size schedules satisfying the vanishing-bias condition
/// sqrt(N) h^(gamma/beta) -> 0 (paper_exact) or balancing squared bias
/// against the 1/N variance term (balanced).
enum class StepMode { paper_exact, balanced };
double default_step(std::int64_t n, double beta, double gamma, StepMode mode);

}  // namespace fracmc
