#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fracmc {

/// Configuration of the replication figure suite.  Defaults reproduce the
/// published setup: d = 1, alpha = 1/2, beta = 3/2, c = 1, N = 1e5 samples
/// per grid point, h = 0.01 for the stepped runs and h = 1e-3 for the
/// confidence-interval study.
struct FigureConfig {
  std::string out_dir = ".";
  std::int64_t n = 100000;
  double h = 0.01;
  double h_ci = 1e-3;
  double level = 0.95;
  std::uint64_t seed = 3202501;
  int workers = 0;
};

/// Writes fig4_1a.csv, fig4_1b.csv, fig4_2.csv, fig4_3.csv, fig4_4.csv,
/// fig4_5.csv under out_dir and returns the file paths.  Output is a pure
/// function of (seed, config): reruns and any worker count produce
/// bit-identical files.
std::vector<std::string> run_figures(const FigureConfig& cfg);

}  // namespace fracmc
