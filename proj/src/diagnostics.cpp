#include "fracmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracmc/bounds.hpp"
#include "fracmc/special.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracmc {

namespace {

constexpr std::int64_t kBlock = 8192;
constexpr std::uint64_t kCalibOffset = 1ULL << 62;

struct OlsFit {
  double slope;
  double intercept;
  double r_squared;
};

OlsFit ols(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  OlsFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

double empirical_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

// Merge per-replication results into pooled moments, in replication order.
struct PooledMoments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void merge(std::int64_t nb, double mean_b, double m2_b) {
    if (nb == 0) return;
    if (n == 0) {
      n = nb;
      mean = mean_b;
      m2 = m2_b;
      return;
    }
    const double na = static_cast<double>(n);
    const double nbd = static_cast<double>(nb);
    const double tot = na + nbd;
    const double delta = mean_b - mean;
    m2 = m2 + m2_b + delta * delta * na * nbd / tot;
    mean += delta * nbd / tot;
    n += nb;
  }
};

}  // namespace

TailFit fit_tail_exponent(std::span<const double> samples, double q_lo,
                          double q_hi, int n_points) {
  if (samples.size() < 10000)
    throw std::invalid_argument("fit_tail_exponent: need at least 1e4 samples");
  if (!(q_lo >= 0.9 && q_lo < q_hi && q_hi < 1.0))
    throw std::invalid_argument(
        "fit_tail_exponent: need 0.9 <= q_lo < q_hi < 1");
  if (n_points < 5)
    throw std::invalid_argument("fit_tail_exponent: need n_points >= 5");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double u_min = empirical_quantile(sorted, q_lo);
  const double u_max = empirical_quantile(sorted, q_hi);
  if (!(u_min > 0.0) || !(u_max > u_min))
    throw std::invalid_argument("fit_tail_exponent: degenerate tail window");

  TailFit fit;
  fit.u_min = u_min;
  fit.u_max = u_max;
  const double log_lo = std::log(u_min), log_hi = std::log(u_max);
  std::vector<double> lx, ly;
  const double n = static_cast<double>(sorted.size());
  for (int i = 0; i < n_points; ++i) {
    const double lu = log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                   static_cast<double>(n_points - 1);
    const double u = std::exp(lu);
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), u);
    const double surv =
        static_cast<double>(std::distance(it, sorted.end())) / n;
    if (surv <= 0.0) continue;
    lx.push_back(lu);
    ly.push_back(std::log(surv));
    fit.thresholds.push_back(u);
    fit.survival.push_back(surv);
  }
  if (lx.size() < 5)
    throw std::invalid_argument("fit_tail_exponent: too few usable tail points");
  const OlsFit f = ols(lx, ly);
  fit.slope = f.slope;
  fit.intercept = f.intercept;
  fit.r_squared = f.r_squared;
  fit.n_points = static_cast<int>(lx.size());
  return fit;
}

CltReport clt_replication(const ProblemSpec& problem, std::int64_t n,
                          std::int64_t reps, std::uint64_t seed, double level,
                          double h, std::optional<double> reference) {
  problem.validate();
  if (reps < 100)
    throw std::invalid_argument("clt_replication: need reps >= 100");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("clt_replication: level must be in (0,1)");
  if (!reference) reference = closed_form_reference(problem);
  if (!reference)
    throw std::invalid_argument(
        "clt_replication: no reference value (supply one or use a catalog "
        "problem at x = 0)");

  std::vector<EstimateResult> results(static_cast<std::size_t>(reps));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t r = 0; r < reps; ++r) {
    results[static_cast<std::size_t>(r)] =
        estimate(problem, n, h, seed, 1, EndpointRule::left,
                 static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(n));
  }

  PooledMoments pooled;
  for (const auto& res : results) pooled.merge(res.n, res.mean, res.m2);
  const double pooled_sd =
      std::sqrt(pooled.m2 / static_cast<double>(pooled.n - 1));
  if (!(pooled_sd > 0.0))
    throw std::invalid_argument(
        "clt_replication: degenerate problem, pooled standard deviation is 0");

  CltReport rep;
  rep.replications = reps;
  rep.n_per_rep = n;
  rep.h = h;
  rep.level = level;
  rep.reference = *reference;
  rep.pooled_sd = pooled_sd;
  const double sqn = std::sqrt(static_cast<double>(n));
  const double z = normal_quantile_upper((1.0 - level) / 2.0);
  std::int64_t covered = 0;
  rep.standardized.reserve(results.size());
  rep.covered.reserve(results.size());
  for (const auto& res : results) {
    const double s = sqn * (res.mean - *reference) / pooled_sd;
    rep.standardized.push_back(s);
    const bool c = std::abs(s) <= z;
    rep.covered.push_back(c ? 1 : 0);
    covered += c ? 1 : 0;
  }
  rep.empirical_coverage =
      static_cast<double>(covered) / static_cast<double>(reps);
  rep.normality_stat = ks_statistic_normal(rep.standardized);
  rep.normality_pvalue =
      ks_pvalue(rep.normality_stat, rep.standardized.size());
  return rep;
}

double coverage_at(const CltReport& report, double level) {
  const double z = normal_quantile_upper((1.0 - level) / 2.0);
  std::int64_t covered = 0;
  for (double s : report.standardized)
    if (std::abs(s) <= z) ++covered;
  return static_cast<double>(covered) /
         static_cast<double>(report.standardized.size());
}

BerryEsseenResult berry_esseen_check(const ProblemSpec& problem,
                                     std::span<const std::int64_t> n_grid,
                                     std::int64_t reps, std::uint64_t seed,
                                     std::int64_t calib_n) {
  problem.validate();
  if (problem.has_forcing())
    throw std::invalid_argument("berry_esseen_check: needs g = 0");
  if (!(problem.phi_growth < problem.stable.beta / 3.0))
    throw std::invalid_argument(
        "berry_esseen_check: phi growth must be below beta/3 for a finite "
        "third moment");
  const auto reference = closed_form_reference(problem);
  if (!reference)
    throw std::invalid_argument(
        "berry_esseen_check: needs a catalog problem with a closed form");

  // calibration: sigma from streaming m2, rho by a second deterministic pass
  const EstimateResult calib = estimate(problem, calib_n, 0.0, seed, 0,
                                        EndpointRule::left, kCalibOffset);
  const double sigma = std::sqrt(calib.m2 / static_cast<double>(calib.n - 1));
  if (!(sigma > 0.0))
    throw std::invalid_argument("berry_esseen_check: degenerate distribution");

  const std::int64_t nblocks = (calib_n + kBlock - 1) / kBlock;
  std::vector<double> block_sums(static_cast<std::size_t>(nblocks), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(calib_n, lo + kBlock);
    double sum = 0.0, carry = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) {
      RngStream rng(seed, kCalibOffset + static_cast<std::uint64_t>(k));
      const double d = std::abs(sample_Y(problem, rng) - calib.mean);
      const double term = d * d * d - carry;
      const double t = sum + term;
      carry = (t - sum) - term;
      sum = t;
    }
    block_sums[static_cast<std::size_t>(b)] = sum;
  }
  double rho_sum = 0.0;
  for (double s : block_sums) rho_sum += s;
  const double rho = rho_sum / static_cast<double>(calib_n);

  BerryEsseenResult out;
  out.sigma_hat = sigma;
  out.rho_hat = rho;
  std::uint64_t offset = 0;
  for (std::int64_t n : n_grid) {
    std::vector<double> psi(static_cast<std::size_t>(reps));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t r = 0; r < reps; ++r) {
      const EstimateResult res =
          estimate(problem, n, 0.0, seed, 1, EndpointRule::left,
                   offset + static_cast<std::uint64_t>(r) *
                                static_cast<std::uint64_t>(n));
      const double s =
          std::sqrt(static_cast<double>(n)) * (res.mean - *reference) / sigma;
      psi[static_cast<std::size_t>(r)] = std::sin(s);
    }
    offset += static_cast<std::uint64_t>(reps) * static_cast<std::uint64_t>(n);
    MomentAccumulator acc;
    for (double v : psi) acc.add(v);
    BerryEsseenPoint pt;
    pt.n = n;
    pt.lhs = std::abs(acc.mean());  // E[sin W] = 0 by symmetry
    pt.lhs_se = acc.stderr_mean();
    pt.rhs = berry_esseen_bound(rho, sigma, n, 1.0);
    out.points.push_back(pt);
  }
  return out;
}

std::vector<ScalingPoint> scaling_check(const ProblemSpec& problem_template,
                                        std::span<const double> abar_grid,
                                        double exponent, std::int64_t n,
                                        double h, std::uint64_t seed,
                                        int workers) {
  std::vector<ScalingPoint> out;
  out.reserve(abar_grid.size());
  std::uint64_t offset = 0;
  for (double abar : abar_grid) {
    ProblemSpec p = problem_template;
    p.win = {p.win.a, p.win.a + abar};
    const EstimateResult res =
        estimate(p, n, h, seed, workers, EndpointRule::left, offset);
    offset += static_cast<std::uint64_t>(n);
    ScalingPoint pt;
    pt.abar = abar;
    pt.estimate = res.mean;
    pt.stderr_mean = res.stderr_mean();
    pt.ratio = exponent == 0.0 ? res.mean : res.mean / std::pow(abar, exponent);
    out.push_back(pt);
  }
  return out;
}

BiasDecayResult bias_decay_check(const ProblemSpec& problem,
                                 std::span<const double> h_grid, double h_ref,
                                 std::int64_t n, std::uint64_t seed,
                                 bool coupled) {
  problem.validate();
  if (!coupled)
    throw std::invalid_argument(
        "bias_decay_check: uncoupled streams make the check meaningless");
  if (h_grid.empty())
    throw std::invalid_argument("bias_decay_check: empty h grid");
  std::vector<std::int64_t> mult;
  double h_min = h_grid[0];
  for (double h : h_grid) {
    h_min = std::min(h_min, h);
    const double ratio = h / h_ref;
    const auto m = static_cast<std::int64_t>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
      throw std::invalid_argument(
          "bias_decay_check: h grid entries must be integer multiples of "
          "h_ref");
    mult.push_back(m);
  }
  if (!(h_ref < h_min / 10.0))
    throw std::invalid_argument(
        "bias_decay_check: h_ref must be below min(h_grid)/10");

  const std::size_t ng = h_grid.size();
  const int d = problem.stable.d;
  const bool forced = problem.has_forcing();

  struct Block {
    std::vector<MomentAccumulator> abs_acc, sq_acc;
  };
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<Block> blocks(static_cast<std::size_t>(nblocks));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t b = 0; b < nblocks; ++b) {
    Block& blk = blocks[static_cast<std::size_t>(b)];
    blk.abs_acc.resize(ng);
    blk.sq_acc.resize(ng);
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(n, lo + kBlock);
    std::vector<double> x(d), dx(d), s(ng, 0.0);
    std::vector<std::int64_t> n_coarse(ng);
    for (std::int64_t k = lo; k < hi; ++k) {
      RngStream rng(seed, static_cast<std::uint64_t>(k));
      const double tt = sample_hitting_time(problem.sub, problem.win, rng);
      const auto n_ref = static_cast<std::int64_t>(std::floor(tt / h_ref));
      for (std::size_t j = 0; j < ng; ++j)
        n_coarse[j] = static_cast<std::int64_t>(std::floor(tt / h_grid[j]));
      std::copy(problem.x.begin(), problem.x.end(), x.begin());
      std::fill(s.begin(), s.end(), 0.0);
      double s_ref = 0.0;
      // one fine path; every coarse Riemann sum reads the same states
      for (std::int64_t i = 0; i <= n_ref; ++i) {
        if (forced) {
          double gv = 0.0;
          bool have_gv = false;
          if (i < n_ref) {
            gv = problem.g(x);
            have_gv = true;
            s_ref += h_ref * gv;
          }
          for (std::size_t j = 0; j < ng; ++j) {
            if (i % mult[j] == 0 && i / mult[j] < n_coarse[j]) {
              if (!have_gv) {
                gv = problem.g(x);
                have_gv = true;
              }
              s[j] += h_grid[j] * gv;
            }
          }
        }
        if (i < n_ref) {
          sample_isotropic_vector(problem.stable, h_ref, rng, dx);
          for (int c = 0; c < d; ++c) x[c] += dx[c];
        }
      }
      // phi terms share the terminal state and cancel in every difference
      for (std::size_t j = 0; j < ng; ++j) {
        const double diff = s[j] - s_ref;
        blk.abs_acc[j].add(std::abs(diff));
        blk.sq_acc[j].add(diff * diff);
      }
    }
  }

  std::vector<MomentAccumulator> abs_acc(ng), sq_acc(ng);
  for (const auto& blk : blocks)
    for (std::size_t j = 0; j < ng; ++j) {
      abs_acc[j].merge(blk.abs_acc[j]);
      sq_acc[j].merge(blk.sq_acc[j]);
    }

  BiasDecayResult out;
  bool all_zero = true;
  std::vector<double> lx, ly, ly2;
  for (std::size_t j = 0; j < ng; ++j) {
    BiasDecayPoint pt;
    pt.h = h_grid[j];
    pt.mean_abs = abs_acc[j].mean();
    pt.se_abs = abs_acc[j].stderr_mean();
    pt.mean_sq = sq_acc[j].mean();
    pt.se_sq = sq_acc[j].stderr_mean();
    out.points.push_back(pt);
    if (pt.mean_abs > 0.0) {
      lx.push_back(std::log(pt.h));
      ly.push_back(std::log(pt.mean_abs));
      ly2.push_back(std::log(pt.mean_sq));
      all_zero = false;
    }
  }
  if (all_zero || !forced) {
    out.exact_agreement = true;
    return out;
  }
  if (lx.size() >= 2) {
    out.slope = ols(lx, ly).slope;
    out.slope_sq = ols(lx, ly2).slope;
  }
  return out;
}

std::vector<RunningMeanPoint> running_mean_trajectory(
    const ProblemSpec& problem, std::int64_t n, double h, std::uint64_t seed,
    std::span<const std::int64_t> checkpoints) {
  problem.validate();
  MomentAccumulator acc;
  std::vector<RunningMeanPoint> out;
  std::size_t next = 0;
  for (std::int64_t k = 0; k < n && next < checkpoints.size(); ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    const double y =
        h > 0.0 ? sample_Yh(problem, h, rng) : sample_Y(problem, rng);
    acc.add(y);
    if (acc.count() == checkpoints[next]) {
      out.push_back({acc.count(), acc.mean(), acc.stderr_mean()});
      ++next;
    }
  }
  return out;
}

}  // namespace fracmc
