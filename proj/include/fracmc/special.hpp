#pragma once

#include <cstddef>
#include <span>

namespace fracmc {

/// Gamma function, Lanczos approximation (g=7, 9 coefficients) with the
/// reflection formula for arguments below 1/2.  Relative error is around
/// 1e-14 on (0, 30), which is what the closed-form moment formulas need.
/// Throws std::domain_error at the poles (non-positive integers).
double gamma_fn(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Upper-quantile function z(t): the value with normal_cdf(z) = 1 - t,
/// found by safeguarded Newton iteration to absolute tolerance 1e-10.
double normal_quantile_upper(double t);

/// One-sided-stable / Kolmogorov asymptotic survival Q(lambda).
double kolmogorov_pvalue(double lambda);

/// One-sample Kolmogorov-Smirnov statistic against the standard normal.
/// Sorts a copy of the input.
double ks_statistic_normal(std::span<const double> samples);

/// P-value for a one-sample KS statistic at sample size n (asymptotic with
/// the small-sample correction factor sqrt(n) + 0.12 + 0.11/sqrt(n)).
double ks_pvalue(double d, std::size_t n);

/// Two-sample KS statistic and p-value.
double ks_statistic_two_sample(std::span<const double> a,
                               std::span<const double> b);
double ks_pvalue_two_sample(double d, std::size_t n1, std::size_t n2);

}  // namespace fracmc
