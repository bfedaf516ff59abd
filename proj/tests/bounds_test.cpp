#include "fracmc/bounds.hpp"

#include <cmath>
#include <doctest.h>
#include <stdexcept>

#include "fracmc/catalog.hpp"
#include "fracmc/special.hpp"
#include "test_util.hpp"

using namespace fracmc;

TEST_CASE("stable fractional moments") {
  CHECK(frac_moment_stable(0.0, 1.5, 1.0, 1.0) == 1.0);
  // beta = 2 cross-check: E|N(0,2)| = 2/sqrt(pi)
  CHECK(frac_moment_stable(1.0, 2.0, 1.0, 1.0) ==
        doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(frac_moment_stable(0.5, 1.5, 1.0, 1.0) ==
        doctest::Approx(1.0804297973745145).epsilon(1e-12));
  // (t c) scaling
  CHECK(frac_moment_stable(0.5, 1.5, 2.0, 3.0) ==
        doctest::Approx(std::pow(6.0, 1.0 / 3.0) * 1.0804297973745145)
            .epsilon(1e-12));
  CHECK_THROWS_AS(frac_moment_stable(-1.0, 1.5, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(frac_moment_stable(1.5, 1.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("subordinator fractional moments") {
  CHECK(frac_moment_subordinator(0.0, 0.5) == 1.0);
  CHECK(frac_moment_subordinator(-1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(frac_moment_subordinator(-1.0 / 6.0, 0.5) ==
        doctest::Approx(0.9625535215215815).epsilon(1e-12));
  CHECK_THROWS_AS(frac_moment_subordinator(0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(frac_moment_subordinator(0.7, 0.5), std::domain_error);
}

TEST_CASE("hitting-time moments") {
  CHECK(hitting_time_moment(1.0, 0.5, 1.0) ==
        doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(hitting_time_moment(2.0, 0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(hitting_time_moment(1.0, 0.5, 0.0) == 0.0);
  // abar scaling: abar^(k alpha) = 4 at k = 2, alpha = 1/2, abar = 4
  CHECK(hitting_time_moment(2.0, 0.5, 4.0) ==
        doctest::Approx(2.0 * 4.0).epsilon(1e-12));
  CHECK_THROWS_AS(hitting_time_moment(-1.0, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(hitting_time_moment(-2.5, 0.5, 1.0), std::domain_error);
}

TEST_CASE("stable tail constant against the quadrature oracle") {
  for (double beta : {0.5, 1.2, 1.5, 1.9}) {
    const double oracle = 1.0 / fracmc::test::sin_integral_oracle(beta);
    CHECK(std::abs(c_beta(beta) - oracle) / oracle < 1e-6);
  }
  CHECK(c_beta(1.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
  // pole-free form stays smooth through beta = 1
  CHECK(c_beta(1.0 - 1e-9) == doctest::Approx(2.0 / M_PI).epsilon(1e-7));
  CHECK(c_beta(1.0 + 1e-9) == doctest::Approx(2.0 / M_PI).epsilon(1e-7));
  CHECK(c_beta(0.5) == doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(c_beta(1.5) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK_THROWS_AS(c_beta(2.0), std::domain_error);
  CHECK_THROWS_AS(c_beta(0.0), std::domain_error);
}

TEST_CASE("tail constants and the partition parameter optimum") {
  StableSpec stable{1.5, 1.0, 1};
  TailBoundParams params{0.01, std::log(2.0) / 1.5, 10.0, 1.0};
  const TailConstants tc = tail_constants(stable, params, 0.5, 1.0);
  // prefactor at the optimum is 1 + 2*4 = 9
  CHECK(tc.m1 ==
        doctest::Approx(9.0 * (0.01 + c_beta(1.5)) + 1.0).epsilon(1e-12));
  CHECK(tc.m2 == doctest::Approx(2.0 * tc.m1).epsilon(1e-12));

  // S = ln2/beta minimizes e^(2 beta S)/(e^(beta S)-1)
  auto factor = [](double beta, double s) {
    const double y = std::exp(beta * s);
    return y * y / (y - 1.0);
  };
  const double s_star = std::log(2.0) / 1.5;
  CHECK(factor(1.5, s_star) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(factor(1.5, s_star + 0.1) > 4.0);
  CHECK(factor(1.5, s_star - 0.1) > 4.0);

  // M^(2) is linear in abar^(-alpha/beta)
  const TailConstants t2 = tail_constants(stable, params, 0.5, 8.0);
  CHECK(t2.m2 / tc.m2 ==
        doctest::Approx(std::pow(8.0, -0.5 / 1.5)).epsilon(1e-12));
}

TEST_CASE("phi second-moment bound") {
  TailBoundParams p{0.0, 0.0, 1.0, 2.0};
  CHECK(phi_second_moment_bound(p, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(phi_second_moment_bound(p, 2.0) > phi_second_moment_bound(p, 1.0));

  // d scaling: with M0 ~ sqrt(d) and M2 ~ d^(1+beta/2) the bound is
  // O(d^(1+beta/2))
  const double beta = 1.5;
  double prev_ratio = 0.0;
  for (double d : {16.0, 64.0, 256.0, 1024.0}) {
    TailBoundParams q{0.0, 0.0, std::sqrt(d) * 10.0, 1.0};
    const double m2 = std::pow(d, 1.0 + beta / 2.0);
    const double ratio =
        phi_second_moment_bound(q, m2) / std::pow(d, 1.0 + beta / 2.0);
    if (prev_ratio > 0.0) CHECK(ratio < prev_ratio * 1.05);
    prev_ratio = ratio;
  }
}

TEST_CASE("M2 per-coordinate moment sum") {
  StableSpec stable{1.5, 1.0, 1};
  CHECK(m2_constant(stable, 0.5) ==
        doctest::Approx(2.0 * gamma_fn(1.0 / 3.0) / M_PI).epsilon(1e-12));
  CHECK(m2_constant(stable, 0.5) ==
        doctest::Approx(1.7054652401523882).epsilon(1e-12));
  StableSpec wide{1.5, 1.0, 7};
  CHECK(m2_constant(wide, 0.5) ==
        doctest::Approx(7.0 * m2_constant(stable, 0.5)).epsilon(1e-12));
  // gamma -> 0 limit is d
  CHECK(m2_constant(wide, 1e-12) == doctest::Approx(7.0).epsilon(1e-9));
  CHECK_THROWS_AS(m2_constant(stable, 0.75), std::domain_error);
}

TEST_CASE("variance bound assembles the three displayed terms") {
  ProblemSpec p = catalog::ci_study();
  // E[(T+1)^3] piece
  const double e_cube = hitting_time_moment(3.0, 0.5, 1.0) +
                        3.0 * hitting_time_moment(2.0, 0.5, 1.0) +
                        3.0 * hitting_time_moment(1.0, 0.5, 1.0) + 1.0;
  CHECK(e_cube == doctest::Approx(14.898654169668588).epsilon(1e-12));
  const double gb = p.gamma / p.stable.beta;
  const double b = m2_constant(p.stable, p.gamma) / ((1.0 + gb) * (1.0 + gb)) *
                   e_cube;
  CHECK(variance_bound(p, 1.0) ==
        doctest::Approx(1.0 + b + std::sqrt(b)).epsilon(1e-12));

  SUBCASE("no forcing reduces to the phi bound") {
    const ProblemSpec q = catalog::unbiased_sqrt();
    CHECK(variance_bound(q, 3.7) == 3.7);
  }
  SUBCASE("zero phi keeps the middle term alone") {
    const ProblemSpec q = catalog::forcing_only();
    CHECK(variance_bound(q, 0.0) == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("bias bound and its leading coefficient") {
  const ProblemSpec p = catalog::ci_study();
  // K = (3/4) sqrt(2) Gamma(2/3) / sqrt(pi)
  const double k_expected =
      0.75 * std::sqrt(2.0) * gamma_fn(2.0 / 3.0) / std::sqrt(M_PI);
  CHECK(k_expected == doctest::Approx(0.8103223480308859).epsilon(1e-12));
  const double m2tx = bias_bound_coefficient(p);
  CHECK(m2tx == doctest::Approx(k_expected * hitting_time_moment(1.0, 0.5, 1.0))
                    .epsilon(1e-12));
  const double m3 = *forcing_mean_bound(p);
  CHECK(bias_bound(p, 0.01, m3) ==
        doctest::Approx(m3 * 0.01 + k_expected * std::pow(0.01, 4.0 / 3.0) +
                        m2tx * std::pow(0.01, 1.0 / 3.0))
            .epsilon(1e-12));

  SUBCASE("constant forcing gives zero") {
    ProblemSpec q = catalog::ci_study();
    q.lip = 0.0;
    CHECK(bias_bound(q, 0.5, 0.0) == 0.0);
  }
  SUBCASE("leading-order scaling is h^(gamma/beta)") {
    const double r = bias_bound(p, 2e-9, m3) / bias_bound(p, 1e-9, m3);
    CHECK(r == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-3));
  }
}

TEST_CASE("squared bias bound") {
  const ProblemSpec p = catalog::ci_study();
  CHECK(bias_sq_bound_coefficient(p) ==
        doctest::Approx(2.0 * 1.7054652401523882).epsilon(1e-10));
  const double gsq = *forcing_sq_bound(p);
  SUBCASE("zeros") {
    ProblemSpec q = catalog::ci_study();
    q.lip = 0.0;
    CHECK(bias_sq_bound(q, 0.3, 0.0) == 0.0);
  }
  SUBCASE("leading-order scaling is h^(2 gamma/beta)") {
    const double r = bias_sq_bound(p, 2e-9, gsq) / bias_sq_bound(p, 1e-9, gsq);
    CHECK(r == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-3));
  }
}

TEST_CASE("Z second-moment bound") {
  SUBCASE("phi == 0, g == 0") {
    ProblemSpec q = catalog::unbiased_sqrt();
    q.phi = catalog::constant_field(0.0);
    q.phi_form = PowerForm{0.0, 0.0};
    CHECK(z_second_moment_bound(q, 0.0) == 0.0);
  }
  SUBCASE("phi == 1, g == 0 gives 2") {
    ProblemSpec q = catalog::unbiased_sqrt();
    q.phi = catalog::constant_field(1.0);
    q.phi_form = PowerForm{1.0, 0.0};
    CHECK(z_second_moment_bound(q, 1.0) == 2.0);
  }
  SUBCASE("CI-study configuration is finite and assembled from parts") {
    const ProblemSpec p = catalog::ci_study();
    const double tgb = 2.0 * p.gamma / p.stable.beta;
    const double path = m2_constant(p.stable, p.gamma) *
                        hitting_time_moment(2.0 + tgb, 0.5, 1.0) / (1.0 + tgb);
    const double expected = 2.0 * 1.0 + 4.0 * (0.0 + path);
    CHECK(z_second_moment_bound(p, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::isfinite(expected));
  }
}

TEST_CASE("L2 bound and confidence intervals") {
  CHECK(l2_error_bound(10000, 1e-3, 15.0, 1.0, 0.5, 1.5) ==
        doctest::Approx(0.0115).epsilon(1e-10));
  CHECK(l2_error_bound(100, 0.0, 15.0, 1.0, 0.5, 1.5) ==
        doctest::Approx(0.15).epsilon(1e-12));
  CHECK(l2_error_bound(200, 1e-3, 15.0, 1.0, 0.5, 1.5) <
        l2_error_bound(100, 1e-3, 15.0, 1.0, 0.5, 1.5));
  CHECK(l2_error_bound(100, 2e-3, 15.0, 1.0, 0.5, 1.5) >
        l2_error_bound(100, 1e-3, 15.0, 1.0, 0.5, 1.5));

  const Interval m = markov_ci(1.0, 0.01, 0.95);
  CHECK(m.half_width() == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
  CHECK(markov_ci(1.0, 0.0, 0.95).half_width() == 0.0);
  CHECK(markov_ci(0.0, 0.04, 0.95).half_width() >
        markov_ci(0.0, 0.01, 0.95).half_width());

  const Interval a = asymptotic_ci(0.0, 2.0, 10000, 0.95);
  CHECK(a.half_width() == doctest::Approx(0.0391992796908).epsilon(1e-8));
  CHECK(asymptotic_ci(0.0, 2.0, 40000, 0.95).half_width() ==
        doctest::Approx(a.half_width() / 2.0).epsilon(1e-12));
}

TEST_CASE("Berry-Esseen bound") {
  CHECK(berry_esseen_bound(1.0, 1.0, 1, 1.0) == doctest::Approx(0.433));
  CHECK(berry_esseen_bound(2.0, 1.0, 100, 1.0) ==
        doctest::Approx(0.0866).epsilon(1e-12));
  CHECK(berry_esseen_bound(2.0, 1.0, 400, 1.0) ==
        doctest::Approx(0.0433).epsilon(1e-12));
  CHECK_THROWS_AS(berry_esseen_bound(1.0, 0.0, 10, 1.0), std::domain_error);
}

TEST_CASE("closed-form references for the catalog") {
  CHECK(*closed_form_reference(catalog::unbiased_sqrt()) ==
        doctest::Approx(1.0399715062196877).epsilon(1e-12));
  CHECK(*closed_form_reference(catalog::ci_study()) ==
        doctest::Approx(2.0687418480915814).epsilon(1e-12));
  CHECK(*closed_form_reference(catalog::forcing_only()) ==
        doctest::Approx(1.0687418480915814).epsilon(1e-12));
  CHECK(*closed_form_reference(catalog::unbiased_two_fifths()) ==
        doctest::Approx(0.9967577363852306).epsilon(1e-12));
  // off-origin problems have no closed form
  ProblemSpec p = catalog::unbiased_sqrt();
  p.x = {1.0};
  CHECK_FALSE(closed_form_reference(p).has_value());
}

TEST_CASE("bounds report carries every constant") {
  const ProblemSpec p = catalog::ci_study();
  const TailBoundParams params = TailBoundParams::defaults(p);
  CHECK(params.S == doctest::Approx(std::log(2.0) / 1.5));
  CHECK(params.M0 == doctest::Approx(10.0));
  const BoundsReport r = make_bounds_report(p, params, 10000, 1e-3);
  CHECK(r.c_beta == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(r.phi_sq_bound == 1.0);  // exact for phi == 1
  CHECK(r.var_bound >= r.phi_sq_bound);
  CHECK(r.z_sq_bound > 0.0);
  CHECK(r.l2_bound ==
        doctest::Approx(l2_error_bound(10000, 1e-3, r.var_bound, r.bias_const,
                                       0.5, 1.5))
            .epsilon(1e-12));
  const std::string row = r.csv_row("ci_study");
  CHECK(row.rfind(",ci_study") == row.size() - 9);
}
