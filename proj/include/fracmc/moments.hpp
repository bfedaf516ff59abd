#pragma once

#include <cmath>
#include <cstdint>

namespace fracmc {

/// Single-pass central-moment accumulator (Welford / Pebay updates) with
/// Kahan-compensated additions.  Tracks mean, second and third central
/// moment sums, plus a running sum of |x - mean|^3 as an estimate of the
/// third absolute central moment.  Merging two accumulators uses the
/// standard pairwise formulas; merge order must be fixed by the caller for
/// bit-reproducible results.
class MomentAccumulator {
 public:
  void add(double x) {
    const std::int64_t n1 = n_;
    n_ += 1;
    const double delta = x - mean_;
    const double delta_n = delta / static_cast<double>(n_);
    const double term1 = delta * delta_n * static_cast<double>(n1);
    kadd(abs3_, abs3_c_, std::abs(delta * delta * delta));
    kadd(m3_, m3_c_, term1 * delta_n * static_cast<double>(n_ - 2) -
                         3.0 * delta_n * m2_);
    kadd(m2_, m2_c_, term1);
    kadd(mean_, mean_c_, delta_n);
  }

  void merge(const MomentAccumulator& b) {
    if (b.n_ == 0) return;
    if (n_ == 0) {
      *this = b;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(b.n_);
    const double n = na + nb;
    const double delta = b.mean_ - mean_;
    const double m2 = m2_ + b.m2_ + delta * delta * na * nb / n;
    const double m3 = m3_ + b.m3_ +
                      delta * delta * delta * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * b.m2_ - nb * m2_) / n;
    mean_ = mean_ + delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    abs3_ += b.abs3_;
    n_ += b.n_;
    mean_c_ = m2_c_ = m3_c_ = abs3_c_ = 0.0;
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double m3() const { return m3_; }
  double abs3_sum() const { return abs3_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stderr_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  static void kadd(double& sum, double& carry, double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  std::int64_t n_ = 0;
  double mean_ = 0.0, mean_c_ = 0.0;
  double m2_ = 0.0, m2_c_ = 0.0;
  double m3_ = 0.0, m3_c_ = 0.0;
  double abs3_ = 0.0, abs3_c_ = 0.0;
};

}  // namespace fracmc
