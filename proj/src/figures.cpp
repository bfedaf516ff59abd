#include "fracmc/figures.hpp"

#include <cmath>
#include <filesystem>

#include "fracmc/bounds.hpp"
#include "fracmc/catalog.hpp"
#include "fracmc/csv.hpp"
#include "fracmc/diagnostics.hpp"
#include "fracmc/estimator.hpp"
#include "fracmc/special.hpp"

namespace fracmc {

namespace {

std::vector<double> tenth_grid(double lo, double hi) {
  std::vector<double> g;
  const auto steps = static_cast<int>(std::llround((hi - lo) * 10.0));
  g.reserve(static_cast<std::size_t>(steps + 1));
  for (int i = 0; i <= steps; ++i)
    g.push_back(lo + static_cast<double>(i) / 10.0);
  return g;
}

}  // namespace

std::vector<std::string> run_figures(const FigureConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> files;
  auto path = [&cfg, &files](const char* name) {
    std::string p = (fs::path(cfg.out_dir) / name).string();
    files.push_back(p);
    return p;
  };

  const std::vector<double> abar_grid = tenth_grid(1.0, 10.0);

  // 4.1(a)/(b): unbiased estimator over the window grid, raw and scaled by
  // abar^(alpha/(2 beta)) = abar^(1/6)
  {
    const ProblemSpec tmpl = catalog::unbiased_sqrt();
    const double expo = tmpl.sub.alpha / (2.0 * tmpl.stable.beta);
    const auto pts = scaling_check(tmpl, abar_grid, expo, cfg.n, 0.0,
                                   cfg.seed, cfg.workers);
    CsvWriter a(path("fig4_1a.csv"));
    a.header("abar,estimate,stderr");
    CsvWriter b(path("fig4_1b.csv"));
    b.header("abar,ratio,stderr_ratio");
    for (const auto& pt : pts) {
      a.cell(pt.abar).cell(pt.estimate).cell(pt.stderr_mean);
      a.end_row();
      const double scale = std::pow(pt.abar, expo);
      b.cell(pt.abar).cell(pt.ratio).cell(pt.stderr_mean / scale);
      b.end_row();
    }
  }

  // 4.2: stepped estimator, phi = g = |x|^(1/2), h fixed
  {
    const auto pts = scaling_check(catalog::forced_sqrt(), abar_grid, 0.0,
                                   cfg.n, cfg.h, cfg.seed, cfg.workers);
    CsvWriter w(path("fig4_2.csv"));
    w.header("abar,estimate,stderr");
    for (const auto& pt : pts) {
      w.cell(pt.abar).cell(pt.estimate).cell(pt.stderr_mean);
      w.end_row();
    }
  }

  // 4.3: forcing term alone, scaled by abar^(alpha(1+2 beta)/(2 beta))
  {
    const ProblemSpec tmpl = catalog::forcing_only();
    const double expo = tmpl.sub.alpha * (1.0 + 2.0 * tmpl.stable.beta) /
                        (2.0 * tmpl.stable.beta);
    const auto pts = scaling_check(tmpl, abar_grid, expo, cfg.n, cfg.h,
                                   cfg.seed, cfg.workers);
    CsvWriter w(path("fig4_3.csv"));
    w.header("abar,forcing_term,stderr,scaled");
    for (const auto& pt : pts) {
      w.cell(pt.abar).cell(pt.estimate).cell(pt.stderr_mean).cell(pt.ratio);
      w.end_row();
    }
  }

  // 4.4: stepped estimator across start points, abar = 5
  {
    CsvWriter w(path("fig4_4.csv"));
    w.header("x,estimate,stderr");
    const std::vector<double> xs = tenth_grid(0.0, 10.0);
    std::uint64_t offset = 1ULL << 40;  // disjoint from the abar sweeps
    for (double x : xs) {
      ProblemSpec p = catalog::forced_sqrt(5.0);
      p.x = {x};
      const EstimateResult res = estimate(p, cfg.n, cfg.h, cfg.seed,
                                          cfg.workers, EndpointRule::left,
                                          offset);
      offset += static_cast<std::uint64_t>(cfg.n);
      w.cell(x).cell(res.mean).cell(res.stderr_mean());
      w.end_row();
    }
  }

  // 4.5: CI band for phi == 1, g = |x|^(1/2), abar = 1; running prefix
  // means with the conservative half-width sqrt(E[Z^2] bound) z / sqrt(n)
  {
    ProblemSpec p = catalog::ci_study();
    const TailBoundParams params = TailBoundParams::defaults(p);
    const double m_tx =
        std::sqrt(z_second_moment_bound(p, phi_sq_bound_auto(p, params)));
    const double z = normal_quantile_upper((1.0 - cfg.level) / 2.0);
    std::vector<std::int64_t> checkpoints;
    const std::int64_t step = std::max<std::int64_t>(cfg.n / 50, 1);
    for (std::int64_t k = step; k <= cfg.n; k += step) checkpoints.push_back(k);
    const auto traj =
        running_mean_trajectory(p, cfg.n, cfg.h_ci, cfg.seed, checkpoints);
    CsvWriter w(path("fig4_5.csv"));
    w.header("n,estimate,ci_lo,ci_hi,half_width");
    for (const auto& pt : traj) {
      const double r = m_tx * z / std::sqrt(static_cast<double>(pt.n));
      w.cell(static_cast<long long>(pt.n))
          .cell(pt.mean)
          .cell(pt.mean - r)
          .cell(pt.mean + r)
          .cell(r);
      w.end_row();
    }
  }

  return files;
}

}  // namespace fracmc
