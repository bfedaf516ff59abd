#include "fracmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracmc {

namespace {

constexpr std::int64_t kBlock = 8192;  // fixed reduction block, worker-independent

double eval_field(const Field& f, std::span<const double> state,
                  const char* name) {
  double v = f(state);
  if (!std::isfinite(v))
    throw NumericalError(std::string(name) + " evaluated to a non-finite value",
                         std::vector<double>(state.begin(), state.end()));
  return v;
}

}  // namespace

double EstimateResult::stderr_mean() const {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

std::string EstimateResult::csv_header(int d) {
  std::string h = "alpha,beta,gamma,d,abar";
  for (int i = 1; i <= d; ++i) h += ",x" + std::to_string(i);
  h += ",h,n,mean,variance,stderr,max_path_len,seed";
  return h;
}

std::string EstimateResult::csv_row(const ProblemSpec& problem) const {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string row = num(problem.sub.alpha) + "," + num(problem.stable.beta) +
                    "," + num(problem.gamma) + "," +
                    std::to_string(problem.stable.d) + "," +
                    num(problem.win.abar());
  for (double xi : problem.x) row += "," + num(xi);
  row += "," + num(h) + "," + std::to_string(n) + "," + num(mean) + "," +
         num(variance()) + "," + num(stderr_mean()) + "," +
         std::to_string(max_path_len) + "," + std::to_string(seed);
  return row;
}

double sample_Y(const ProblemSpec& problem, RngStream& rng) {
  const int d = problem.stable.d;
  double state[16];
  std::vector<double> heap_state;
  std::span<double> xt = d <= 16 ? std::span<double>(state, d)
                                 : (heap_state.resize(d), std::span<double>(heap_state));
  sample_terminal_state(problem.stable, problem.sub, problem.win, problem.x,
                        rng, xt);
  return eval_field(problem.phi, xt, "phi");
}

double sample_Yh(const ProblemSpec& problem, double h, RngStream& rng,
                 std::int64_t* path_len, EndpointRule rule) {
  if (!(h > 0.0)) throw std::invalid_argument("sample_Yh: h must be > 0");
  const int d = problem.stable.d;
  double state_buf[16];
  double step_buf[16];
  std::vector<double> heap_state, heap_step;
  std::span<double> x = d <= 16
                            ? std::span<double>(state_buf, d)
                            : (heap_state.resize(d), std::span<double>(heap_state));
  std::span<double> dx = d <= 16
                             ? std::span<double>(step_buf, d)
                             : (heap_step.resize(d), std::span<double>(heap_step));
  std::copy(problem.x.begin(), problem.x.end(), x.begin());

  const double tt = sample_hitting_time(problem.sub, problem.win, rng);
  const std::int64_t nsteps =
      tt > 0.0 ? static_cast<std::int64_t>(std::floor(tt / h)) : 0;
  if (path_len != nullptr) *path_len = nsteps;

  double s = 0.0;
  const bool forced = problem.has_forcing();
  for (std::int64_t i = 1; i <= nsteps; ++i) {
    if (forced && rule == EndpointRule::left)
      s += h * eval_field(problem.g, x, "g");
    sample_isotropic_vector(problem.stable, h, rng, dx);
    for (int j = 0; j < d; ++j) x[j] += dx[j];
    if (forced && rule == EndpointRule::right)
      s += h * eval_field(problem.g, x, "g");
  }
  const double rest = tt - h * static_cast<double>(nsteps);
  if (rest > 0.0) {
    // fresh variate for the partial step, never the last full-step draw
    sample_isotropic_vector(problem.stable, rest, rng, dx);
    for (int j = 0; j < d; ++j) x[j] += dx[j];
  }
  return eval_field(problem.phi, x, "phi") + s;
}

namespace {

struct BlockOutcome {
  MomentAccumulator acc;
  std::int64_t max_path = 0;
  std::unique_ptr<NumericalError> error;
};

void run_block(const ProblemSpec& problem, double h, std::uint64_t seed,
               std::uint64_t stream_offset, std::int64_t lo, std::int64_t hi,
               EndpointRule rule, BlockOutcome& out) {
  for (std::int64_t k = lo; k < hi; ++k) {
    RngStream rng(seed, stream_offset + static_cast<std::uint64_t>(k));
    try {
      double y;
      if (h > 0.0) {
        std::int64_t len = 0;
        y = sample_Yh(problem, h, rng, &len, rule);
        out.max_path = std::max(out.max_path, len);
      } else {
        y = sample_Y(problem, rng);
      }
      out.acc.add(y);
    } catch (const NumericalError& e) {
      out.error = std::make_unique<NumericalError>(e.what(), e.state(), k);
      return;
    }
  }
}

EstimateResult finalize(double h, std::uint64_t seed,
                        std::vector<BlockOutcome>& blocks) {
  // merge in ascending block order; the fold is a function of n alone
  for (auto& b : blocks)
    if (b.error) throw *b.error;
  MomentAccumulator total;
  std::int64_t max_path = 0;
  for (auto& b : blocks) {
    total.merge(b.acc);
    max_path = std::max(max_path, b.max_path);
  }
  EstimateResult r;
  r.mean = total.mean();
  r.m2 = total.m2();
  r.m3 = total.m3();
  r.abs3 = total.abs3_sum();
  r.n = total.count();
  r.h = h;
  r.max_path_len = max_path;
  r.seed = seed;
  return r;
}

}  // namespace

EstimateResult estimate(const ProblemSpec& problem, std::int64_t n, double h,
                        std::uint64_t seed, int workers, EndpointRule rule,
                        std::uint64_t stream_offset) {
  problem.validate();
  if (n < 2) throw std::invalid_argument("estimate: n must be >= 2");
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<BlockOutcome> blocks(static_cast<std::size_t>(nblocks));

#ifdef _OPENMP
  int nthreads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(n, lo + kBlock);
    run_block(problem, h, seed, stream_offset, lo, hi, rule,
              blocks[static_cast<std::size_t>(b)]);
  }
#else
  (void)workers;
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(n, lo + kBlock);
    run_block(problem, h, seed, stream_offset, lo, hi, rule,
              blocks[static_cast<std::size_t>(b)]);
  }
#endif
  return finalize(h, seed, blocks);
}

EstimateResult estimate_serial_reference(const ProblemSpec& problem,
                                         std::int64_t n, double h,
                                         std::uint64_t seed, EndpointRule rule,
                                         std::uint64_t stream_offset) {
  problem.validate();
  if (n < 2) throw std::invalid_argument("estimate: n must be >= 2");
  std::vector<BlockOutcome> one(1);
  run_block(problem, h, seed, stream_offset, 0, n, rule, one[0]);
  return finalize(h, seed, one);
}

double default_step(std::int64_t n, double beta, double gamma, StepMode mode) {
  if (n < 1) throw std::invalid_argument("default_step: n must be >= 1");
  const double nd = static_cast<double>(n);
  switch (mode) {
    case StepMode::paper_exact:
      return std::pow(nd, -2.0 * beta / gamma);
    case StepMode::balanced:
      return std::pow(nd, -beta / (2.0 * gamma));
  }
  throw std::invalid_argument("default_step: unknown mode");
}

}  // namespace fracmc
