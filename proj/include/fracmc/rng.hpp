#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace fracmc {

/// Counter-based pseudo-random stream: Philox4x64-10 (Salmon et al. 2011,
/// Random123 parametrization, same as numpy.random.Philox).
///
/// The key is (seed, stream_id), the 256-bit counter starts at zero and is
/// incremented once per generated block of four 64-bit words; words are
/// consumed in order out[0..3].  Two streams with distinct (seed, stream_id)
/// are independent, and a stream's output depends on nothing but its own
/// key, so per-sample streams give results that cannot depend on worker
/// count or scheduling.
///
/// Uniform doubles take the top 53 bits of a word and are clamped into the
/// open interval (0,1) so downstream samplers never see a singular endpoint.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key0_(seed), key1_(stream_id) {}

  std::uint64_t seed() const { return key0_; }
  std::uint64_t stream_id() const { return key1_; }

  std::uint64_t next_u64() {
    if (idx_ == 4) {
      generate_block();
      idx_ = 0;
    }
    return out_[idx_++];
  }

  /// Uniform on the open interval (0,1).
  double uniform() {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u <= 0.0) u = std::numeric_limits<double>::denorm_min();
    if (u >= 1.0) u = std::nextafter(1.0, 0.0);
    return u;
  }

  /// Unit exponential, strictly positive and finite.
  double exponential() { return -std::log(uniform()); }

  /// Standard normal pair via Box-Muller; consumes two uniforms.
  std::pair<double, double> gaussian_pair() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * kPi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static void round(std::uint64_t c[4], std::uint64_t k0, std::uint64_t k1) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c[0] = hi1 ^ c[1] ^ k0;
    c[1] = lo1;
    c[2] = hi0 ^ c[3] ^ k1;
    c[3] = lo0;
  }

  void generate_block() {
    std::uint64_t c[4] = {ctr_[0], ctr_[1], ctr_[2], ctr_[3]};
    std::uint64_t k0 = key0_, k1 = key1_;
    round(c, k0, k1);
    for (int r = 1; r < 10; ++r) {
      k0 += kWeyl0;
      k1 += kWeyl1;
      round(c, k0, k1);
    }
    out_[0] = c[0];
    out_[1] = c[1];
    out_[2] = c[2];
    out_[3] = c[3];
    if (++ctr_[0] == 0)
      if (++ctr_[1] == 0)
        if (++ctr_[2] == 0) ++ctr_[3];
  }

  std::uint64_t key0_, key1_;
  std::uint64_t ctr_[4] = {0, 0, 0, 0};
  std::uint64_t out_[4] = {0, 0, 0, 0};
  int idx_ = 4;
};

}  // namespace fracmc
