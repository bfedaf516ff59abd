// Benchmark: OpenMP block-parallel estimate() against the serial reference,
// on the path-free and the stepped sampler.

#include <chrono>
#include <cstdio>

#include "fracmc/catalog.hpp"
#include "fracmc/estimator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fracmc;

namespace {

template <typename F>
double time_secs(F f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* name, std::int64_t n, double serial, double parallel,
            double mean_serial, double mean_parallel) {
  std::printf("%-24s n=%lld  serial %.3fs (%.2fM samples/s)  parallel %.3fs "
              "(%.2fM samples/s)  speedup %.2fx  |mean diff| %.3g\n",
              name, static_cast<long long>(n), serial,
              static_cast<double>(n) / serial / 1e6, parallel,
              static_cast<double>(n) / parallel / 1e6, serial / parallel,
              std::abs(mean_serial - mean_parallel));
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n_free = 2000000;
  std::int64_t n_path = 100000;
  if (argc > 1) n_free = std::atoll(argv[1]);
  if (argc > 2) n_path = std::atoll(argv[2]);

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif

  {
    const ProblemSpec p = catalog::unbiased_sqrt();
    EstimateResult rs, rp;
    const double ts =
        time_secs([&] { rs = estimate_serial_reference(p, n_free, 0.0, 1); });
    const double tp = time_secs([&] { rp = estimate(p, n_free, 0.0, 1); });
    report("path-free sample_Y", n_free, ts, tp, rs.mean, rp.mean);
  }
  {
    const ProblemSpec p = catalog::forced_sqrt();
    EstimateResult rs, rp;
    const double ts =
        time_secs([&] { rs = estimate_serial_reference(p, n_path, 0.01, 1); });
    const double tp = time_secs([&] { rp = estimate(p, n_path, 0.01, 1); });
    report("stepped sample_Yh h=.01", n_path, ts, tp, rs.mean, rp.mean);
  }
  return 0;
}
