#include "fracmc/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "fracmc/special.hpp"

namespace fracmc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TailBoundParams TailBoundParams::defaults(const ProblemSpec& problem) {
  TailBoundParams p;
  const double beta = problem.stable.beta;
  // sigma^beta = c; the Gaussian boundary beta = 2 has no power tail, so the
  // epsilon default degrades to a scale-proportional placeholder there
  p.epsilon = beta < 2.0 ? 0.01 * c_beta(beta) * problem.stable.c
                         : 0.01 * problem.stable.c;
  p.S = std::log(2.0) / beta;
  p.M0 = std::max(2.0 * norm2(problem.x) +
                      2.0 * std::pow(problem.win.abar(),
                                     problem.sub.alpha / beta),
                  std::sqrt(static_cast<double>(problem.stable.d)) * 10.0);
  p.delta = problem.phi_growth > 0.0 && problem.phi_growth < beta / 2.0
                ? beta / problem.phi_growth - 2.0
                : 1.0;
  return p;
}

double frac_moment_stable(double eta, double beta, double c, double t) {
  if (!(eta > -1.0 && eta < beta))
    throw std::domain_error(
        "frac_moment_stable: eta must be in (-1, beta), moment diverges");
  if (eta == 0.0) return 1.0;
  return std::pow(t * c, eta / beta) * std::pow(2.0, eta) *
         gamma_fn((1.0 + eta) / 2.0) * gamma_fn(1.0 - eta / beta) /
         (kSqrtPi * gamma_fn(1.0 - eta / 2.0));
}

double frac_moment_subordinator(double eta, double alpha) {
  if (!(eta < alpha))
    throw std::domain_error(
        "frac_moment_subordinator: eta must be < alpha, moment diverges");
  if (eta == 0.0) return 1.0;
  return gamma_fn(1.0 - eta / alpha) / gamma_fn(1.0 - eta);
}

double hitting_time_moment(double k, double alpha, double abar) {
  if (!(abar >= 0.0))
    throw std::domain_error("hitting_time_moment: abar must be >= 0");
  if (!(k > -1.0 / alpha))
    throw std::domain_error("hitting_time_moment: k must exceed -1/alpha");
  if (k == 0.0) return 1.0;
  if (abar == 0.0) return k > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(abar, k * alpha) * gamma_fn(1.0 + k) / gamma_fn(1.0 + k * alpha);
}

double c_beta(double beta) {
  if (!(beta > 0.0 && beta < 2.0))
    throw std::domain_error("c_beta: beta must be in (0, 2)");
  // C_beta = x / (Gamma(1-x) sin(pi x / 2)) with x = beta - 1; this form is
  // regular across beta = 1 where the limit is 2/pi.
  const double x = beta - 1.0;
  if (x == 0.0) return 2.0 / kPi;
  return x / (gamma_fn(1.0 - x) * std::sin(kPi * x / 2.0));
}

TailConstants tail_constants(const StableSpec& stable,
                             const TailBoundParams& params, double alpha,
                             double abar) {
  const double beta = stable.beta;
  const double y = std::exp(beta * params.S);
  const double prefactor = 1.0 + 2.0 * y * y / (y - 1.0);
  const double m1 = prefactor *
                        std::pow(static_cast<double>(stable.d), 1.0 + beta / 2.0) *
                        (params.epsilon + c_beta(beta) * stable.c) +
                    1.0;
  const double m2 = 2.0 * std::pow(abar, -alpha / beta) * m1;
  return {m1, m2};
}

double phi_second_moment_bound(const TailBoundParams& params, double m2_tail) {
  return params.M0 +
         2.0 * m2_tail * std::pow(params.M0, -params.delta / 2.0) / params.delta;
}

double m2_constant(const StableSpec& stable, double gamma) {
  const double beta = stable.beta;
  if (!(2.0 * gamma < beta))
    throw std::domain_error("m2_constant: 2*gamma must be < beta");
  if (gamma == 0.0) return static_cast<double>(stable.d);
  return static_cast<double>(stable.d) * std::pow(stable.c, 2.0 * gamma / beta) *
         std::pow(2.0, 2.0 * gamma) * gamma_fn((1.0 + 2.0 * gamma) / 2.0) *
         gamma_fn(1.0 - 2.0 * gamma / beta) / (kSqrtPi * gamma_fn(1.0 - gamma));
}

double variance_bound(const ProblemSpec& problem, double phi_sq_bound) {
  if (!problem.has_forcing() || problem.lip == 0.0) return phi_sq_bound;
  const double alpha = problem.sub.alpha;
  const double beta = problem.stable.beta;
  const double abar = problem.win.abar();
  const double gb = problem.gamma / beta;
  const double et1 = hitting_time_moment(1.0, alpha, abar);
  const double et2 = hitting_time_moment(2.0, alpha, abar);
  const double et3 = hitting_time_moment(3.0, alpha, abar);
  const double e_cube = et3 + 3.0 * et2 + 3.0 * et1 + 1.0;  // E[(T+1)^3]
  const double b = static_cast<double>(problem.stable.d) * problem.lip *
                   problem.lip * m2_constant(problem.stable, problem.gamma) /
                   ((1.0 + gb) * (1.0 + gb)) * e_cube;
  return phi_sq_bound + b + std::sqrt(phi_sq_bound * b);
}

double bias_bound_coefficient(const ProblemSpec& problem) {
  const double alpha = problem.sub.alpha;
  const double beta = problem.stable.beta;
  const double gamma = problem.gamma;
  const double gb = gamma / beta;
  const double k = problem.lip * static_cast<double>(problem.stable.d) *
                   std::pow(problem.stable.c, gb) * std::pow(2.0, gamma) *
                   gamma_fn((1.0 + gamma) / 2.0) * gamma_fn(1.0 - gb) /
                   ((1.0 + gb) * kSqrtPi * gamma_fn(1.0 - gamma / 2.0));
  return k * std::pow(problem.win.abar(), alpha) * gamma_fn(2.0) /
         gamma_fn(1.0 + alpha);
}

double bias_bound(const ProblemSpec& problem, double h, double m3) {
  if (!(h > 0.0)) throw std::invalid_argument("bias_bound: h must be > 0");
  if (!problem.has_forcing() || (problem.lip == 0.0 && m3 == 0.0)) {
    // constant forcing: the Riemann sum matches the integral up to the
    // boundary strip bounded by M_3 h
    return m3 * h;
  }
  const double beta = problem.stable.beta;
  const double gamma = problem.gamma;
  const double gb = gamma / beta;
  const double k = problem.lip * static_cast<double>(problem.stable.d) *
                   std::pow(problem.stable.c, gb) * std::pow(2.0, gamma) *
                   gamma_fn((1.0 + gamma) / 2.0) * gamma_fn(1.0 - gb) /
                   ((1.0 + gb) * kSqrtPi * gamma_fn(1.0 - gamma / 2.0));
  return m3 * h + k * std::pow(h, 1.0 + gb) +
         bias_bound_coefficient(problem) * std::pow(h, gb);
}

double bias_sq_bound_coefficient(const ProblemSpec& problem) {
  const double et2 =
      hitting_time_moment(2.0, problem.sub.alpha, problem.win.abar());
  return problem.lip * problem.lip * et2 *
         m2_constant(problem.stable, problem.gamma);
}

double bias_sq_bound(const ProblemSpec& problem, double h,
                     double g_terminal_sq) {
  if (!(h > 0.0)) throw std::invalid_argument("bias_sq_bound: h must be > 0");
  if (!problem.has_forcing() || (problem.lip == 0.0 && g_terminal_sq == 0.0))
    return 2.0 * h * g_terminal_sq;
  const double beta = problem.stable.beta;
  const double tgb = 2.0 * problem.gamma / beta;
  const double m2c = m2_constant(problem.stable, problem.gamma);
  const double strip = 2.0 * problem.lip * problem.lip *
                       static_cast<double>(problem.stable.d) * m2c *
                       std::pow(h, 1.0 + tgb) / (1.0 + tgb);
  return 2.0 * h * g_terminal_sq + strip +
         bias_sq_bound_coefficient(problem) * std::pow(h, tgb);
}

double z_second_moment_bound(const ProblemSpec& problem, double phi_sq_bound) {
  if (!problem.has_forcing()) return 2.0 * phi_sq_bound;
  const double alpha = problem.sub.alpha;
  const double abar = problem.win.abar();
  const double tgb = 2.0 * problem.gamma / problem.stable.beta;
  const double gx = problem.g(problem.x);
  const double et2 = hitting_time_moment(2.0, alpha, abar);
  // (int_0^T f)^2 <= T int_0^T f^2 raises the path term's T-power to
  // 2 + 2gamma/beta, keeping the bound an actual upper bound
  const double path = problem.lip * problem.lip *
                      static_cast<double>(problem.stable.d) *
                      m2_constant(problem.stable, problem.gamma) *
                      hitting_time_moment(2.0 + tgb, alpha, abar) / (1.0 + tgb);
  return 2.0 * phi_sq_bound + 4.0 * (et2 * gx * gx + path);
}

double l2_error_bound(std::int64_t n, double h, double var_bound,
                      double bias_const, double gamma, double beta) {
  if (n < 1) throw std::invalid_argument("l2_error_bound: n must be >= 1");
  if (h < 0.0) throw std::invalid_argument("l2_error_bound: h must be >= 0");
  const double bias_sq =
      h > 0.0 ? bias_const * bias_const * std::pow(h, 2.0 * gamma / beta) : 0.0;
  return var_bound / static_cast<double>(n) + bias_sq;
}

Interval markov_ci(double estimate, double l2, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("markov_ci: level must be in (0,1)");
  const double r = std::sqrt(l2 / (1.0 - level));
  return {estimate - r, estimate + r};
}

Interval asymptotic_ci(double estimate, double m_tx, std::int64_t n,
                       double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("asymptotic_ci: level must be in (0,1)");
  if (n < 1) throw std::invalid_argument("asymptotic_ci: n must be >= 1");
  const double z = normal_quantile_upper((1.0 - level) / 2.0);
  const double r = m_tx * z / std::sqrt(static_cast<double>(n));
  return {estimate - r, estimate + r};
}

double berry_esseen_bound(double rho, double sigma, std::int64_t n,
                          double psi3_sup) {
  if (!(sigma > 0.0))
    throw std::domain_error("berry_esseen_bound: degenerate distribution");
  return 0.433 * psi3_sup * rho /
         (std::sqrt(static_cast<double>(n)) * sigma * sigma * sigma);
}

std::optional<double> forcing_mean_bound(const ProblemSpec& problem) {
  if (!problem.has_forcing()) return 0.0;
  if (!problem.g_form) return std::nullopt;
  const double kappa = problem.g_form->kappa;
  const double eta = problem.g_form->eta;
  if (eta == 0.0) return std::abs(kappa);
  if (!(eta < problem.stable.beta)) return std::nullopt;
  const double abg = problem.sub.alpha * eta / problem.stable.beta;
  const double ex1 =
      frac_moment_stable(eta, problem.stable.beta, problem.stable.c, 1.0);
  const double base = std::pow(problem.win.abar(), abg) *
                      frac_moment_subordinator(-abg, problem.sub.alpha) * ex1;
  const double xnorm = norm2(problem.x);
  if (xnorm == 0.0) return std::abs(kappa) * base;
  // |X^x|^eta <= (|x| + |X^0|)^eta <= |x|^eta + |X^0|^eta for eta <= 1
  if (eta <= 1.0)
    return std::abs(kappa) * (std::pow(xnorm, eta) + base);
  return std::nullopt;
}

std::optional<double> forcing_sq_bound(const ProblemSpec& problem) {
  if (!problem.has_forcing()) return 0.0;
  if (!problem.g_form) return std::nullopt;
  const double kappa = problem.g_form->kappa;
  const double eta2 = 2.0 * problem.g_form->eta;
  if (eta2 == 0.0) return kappa * kappa;
  if (!(eta2 < problem.stable.beta)) return std::nullopt;
  const double abg = problem.sub.alpha * eta2 / problem.stable.beta;
  const double ex1 =
      frac_moment_stable(eta2, problem.stable.beta, problem.stable.c, 1.0);
  const double base = std::pow(problem.win.abar(), abg) *
                      frac_moment_subordinator(-abg, problem.sub.alpha) * ex1;
  const double xnorm = norm2(problem.x);
  if (xnorm == 0.0) return kappa * kappa * base;
  if (eta2 <= 1.0)
    return kappa * kappa * (std::pow(xnorm, eta2) + base);
  return std::nullopt;
}

std::optional<double> closed_form_reference(const ProblemSpec& problem) {
  if (norm2(problem.x) != 0.0) return std::nullopt;
  if (!problem.phi_form) return std::nullopt;
  const double alpha = problem.sub.alpha;
  const double beta = problem.stable.beta;
  const double abar = problem.win.abar();
  double u = 0.0;
  {
    const double kappa = problem.phi_form->kappa;
    const double eta = problem.phi_form->eta;
    if (eta == 0.0) {
      u += kappa;
    } else {
      if (!(eta < beta)) return std::nullopt;
      const double abg = alpha * eta / beta;
      u += kappa * std::pow(abar, abg) *
           frac_moment_subordinator(-abg, alpha) *
           frac_moment_stable(eta, beta, problem.stable.c, 1.0);
    }
  }
  if (problem.has_forcing()) {
    if (!problem.g_form) return std::nullopt;
    const double kappa = problem.g_form->kappa;
    const double eta = problem.g_form->eta;
    if (!(eta < beta)) return std::nullopt;
    const double p = 1.0 + eta / beta;
    u += kappa * frac_moment_stable(eta, beta, problem.stable.c, 1.0) *
         hitting_time_moment(p, alpha, abar) / p;
  }
  return u;
}

double phi_sq_bound_auto(const ProblemSpec& problem,
                         const TailBoundParams& params) {
  if (problem.phi_form && norm2(problem.x) == 0.0) {
    const double kappa = problem.phi_form->kappa;
    const double eta2 = 2.0 * problem.phi_form->eta;
    if (eta2 == 0.0) return kappa * kappa;
    if (eta2 < problem.stable.beta) {
      const double abg = problem.sub.alpha * eta2 / problem.stable.beta;
      return kappa * kappa * std::pow(problem.win.abar(), abg) *
             frac_moment_subordinator(-abg, problem.sub.alpha) *
             frac_moment_stable(eta2, problem.stable.beta, problem.stable.c,
                                1.0);
    }
  }
  if (!(problem.stable.beta < 2.0))
    throw std::invalid_argument(
        "phi_sq_bound_auto: tail route needs beta < 2; supply a catalog phi");
  const TailConstants tc = tail_constants(problem.stable, params,
                                          problem.sub.alpha, problem.win.abar());
  return phi_second_moment_bound(params, tc.m2);
}

BoundsReport make_bounds_report(const ProblemSpec& problem,
                                const TailBoundParams& params, std::int64_t n,
                                double h) {
  problem.validate();
  BoundsReport r;
  if (problem.stable.beta < 2.0) {
    r.c_beta = c_beta(problem.stable.beta);
    const TailConstants tc = tail_constants(
        problem.stable, params, problem.sub.alpha, problem.win.abar());
    r.m1_tail = tc.m1;
    r.m2_tail = tc.m2;
  }
  r.phi_sq_bound = phi_sq_bound_auto(problem, params);
  r.m2_const = problem.has_forcing()
                   ? m2_constant(problem.stable, problem.gamma)
                   : 0.0;
  r.var_bound = variance_bound(problem, r.phi_sq_bound);
  if (problem.has_forcing()) {
    auto m3 = forcing_mean_bound(problem);
    auto gsq = forcing_sq_bound(problem);
    if (!m3 || !gsq)
      throw std::invalid_argument(
          "make_bounds_report: opaque forcing needs explicit M3 / g^2 bounds");
    r.bias_const = bias_bound_coefficient(problem);
    r.bias2_const = bias_sq_bound_coefficient(problem);
    r.z_sq_bound = z_second_moment_bound(problem, r.phi_sq_bound);
  } else {
    r.bias_const = 0.0;
    r.bias2_const = 0.0;
    r.z_sq_bound = z_second_moment_bound(problem, r.phi_sq_bound);
  }
  r.l2_bound = l2_error_bound(n, h, r.var_bound, r.bias_const, problem.gamma,
                              problem.stable.beta);
  r.n = n;
  r.h = h;
  return r;
}

std::string BoundsReport::csv_header() {
  return "c_beta,m1_tail,m2_tail,phi_sq_bound,m2_const,var_bound,"
         "bias_const,bias2_const,z_sq_bound,l2_bound,n,h,fingerprint";
}

std::string BoundsReport::csv_row(const std::string& fingerprint) const {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return num(c_beta) + "," + num(m1_tail) + "," + num(m2_tail) + "," +
         num(phi_sq_bound) + "," + num(m2_const) + "," + num(var_bound) +
         "," + num(bias_const) + "," + num(bias2_const) + "," +
         num(z_sq_bound) + "," + num(l2_bound) + "," + std::to_string(n) +
         "," + num(h) + "," + fingerprint;
}

}  // namespace fracmc
