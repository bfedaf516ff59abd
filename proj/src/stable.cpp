#include "fracmc/stable.hpp"

#include <cmath>
#include <stdexcept>

namespace fracmc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void SubordinatorSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("SubordinatorSpec: alpha must be in (0,1)");
}

double StableSpec::sigma() const { return std::pow(c, 1.0 / beta); }

void StableSpec::validate() const {
  if (!(beta > 0.0 && beta <= 2.0))
    throw std::invalid_argument("StableSpec: beta must be in (0,2]");
  if (!(c > 0.0)) throw std::invalid_argument("StableSpec: c must be > 0");
  if (d < 1) throw std::invalid_argument("StableSpec: d must be >= 1");
}

void TimeWindow::validate() const {
  if (!(t >= a)) throw std::invalid_argument("TimeWindow: t must be >= a");
}

double sample_subordinator_unit(const SubordinatorSpec& spec, RngStream& rng) {
  const double alpha = spec.alpha;
  const double u = kPi * rng.uniform();  // in (0, pi)
  const double e = rng.exponential();
  // log A(u)^((1-alpha)/alpha) = log_a_inner / alpha with
  // log_a_inner = alpha log sin(alpha u) + (1-alpha) log sin((1-alpha)u)
  //               - log sin(u); working in logs keeps alpha near 0 or 1 sane.
  const double log_a_inner = alpha * std::log(std::sin(alpha * u)) +
                             (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * u)) -
                             std::log(std::sin(u));
  const double log_tau =
      log_a_inner / alpha - ((1.0 - alpha) / alpha) * std::log(e);
  return std::exp(log_tau);
}

double sample_hitting_time(const SubordinatorSpec& spec, const TimeWindow& win,
                           RngStream& rng) {
  const double abar = win.abar();
  const double tau = sample_subordinator_unit(spec, rng);
  if (abar == 0.0) return 0.0;
  return std::pow(abar / tau, spec.alpha);
}

double sample_symmetric_stable(const StableSpec& spec, double dt,
                               RngStream& rng) {
  const double beta = spec.beta;
  const double scale = std::pow(spec.c * dt, 1.0 / beta);
  if (beta == 2.0) {
    // Box-Muller; variance of the increment is 2 c dt.
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    return std::sqrt(2.0) * scale * z;
  }
  const double v = kPi * (rng.uniform() - 0.5);  // in (-pi/2, pi/2)
  const double e = rng.exponential();
  const double x = std::sin(beta * v) / std::pow(std::cos(v), 1.0 / beta) *
                   std::pow(std::cos((1.0 - beta) * v) / e, (1.0 - beta) / beta);
  return scale * x;
}

void sample_isotropic_vector(const StableSpec& spec, double dt, RngStream& rng,
                             std::span<double> out) {
  for (int j = 0; j < spec.d; ++j) out[j] = sample_symmetric_stable(spec, dt, rng);
}

std::vector<double> sample_isotropic_vector(const StableSpec& spec, double dt,
                                            RngStream& rng) {
  std::vector<double> v(spec.d);
  sample_isotropic_vector(spec, dt, rng, v);
  return v;
}

void sample_terminal_state(const StableSpec& stable,
                           const SubordinatorSpec& sub, const TimeWindow& win,
                           std::span<const double> x, RngStream& rng,
                           std::span<double> out) {
  const double tt = sample_hitting_time(sub, win, rng);
  if (tt == 0.0) {
    for (int j = 0; j < stable.d; ++j) out[j] = x[j];
    return;
  }
  const double s = std::pow(tt, 1.0 / stable.beta);
  for (int j = 0; j < stable.d; ++j)
    out[j] = x[j] + s * sample_symmetric_stable(stable, 1.0, rng);
}

std::vector<double> sample_terminal_state(const StableSpec& stable,
                                          const SubordinatorSpec& sub,
                                          const TimeWindow& win,
                                          std::span<const double> x,
                                          RngStream& rng) {
  std::vector<double> v(stable.d);
  sample_terminal_state(stable, sub, win, x, rng, v);
  return v;
}

}  // namespace fracmc
