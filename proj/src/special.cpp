#include "fracmc/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos g=7, n=9 coefficient set (Godfrey).
constexpr double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_positive(double x) {
  // valid for x >= 0.5
  double a = kLanczos[0];
  double t = x + 6.5;  // x + g - 0.5
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i - 1.0);
  return std::sqrt(2.0 * kPi) * std::pow(t, x - 0.5) * std::exp(-t) * a;
}

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x)) throw std::domain_error("gamma_fn: non-finite argument");
  if (x >= 0.5) return lanczos_positive(x);
  // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
  double s = std::sin(kPi * x);
  if (s == 0.0 || x == std::floor(x))
    throw std::domain_error("gamma_fn: pole at non-positive integer");
  return kPi / (s * lanczos_positive(1.0 - x));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double normal_quantile_upper(double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("normal_quantile_upper: t must be in (0,1)");
  double lo = -40.0, hi = 40.0;
  double z = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double f = normal_cdf(z) - (1.0 - t);
    if (f == 0.0) return z;
    if (f > 0.0)
      hi = z;
    else
      lo = z;
    const double dz = f / std::max(normal_pdf(z), 1e-300);
    double znext = z - dz;
    if (std::abs(znext - z) < 1e-12) return znext;
    if (!(znext > lo && znext < hi)) znext = 0.5 * (lo + hi);
    z = znext;
  }
  return z;
}

double kolmogorov_pvalue(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic_normal(std::span<const double> samples) {
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double f = normal_cdf(v[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_pvalue((sn + 0.12 + 0.11 / sn) * d);
}

double ks_statistic_two_sample(std::span<const double> a,
                               std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    double fx = static_cast<double>(i) / static_cast<double>(x.size());
    double fy = static_cast<double>(j) / static_cast<double>(y.size());
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

double ks_pvalue_two_sample(double d, std::size_t n1, std::size_t n2) {
  double ne = static_cast<double>(n1) * static_cast<double>(n2) /
              static_cast<double>(n1 + n2);
  double sn = std::sqrt(ne);
  return kolmogorov_pvalue((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace fracmc
