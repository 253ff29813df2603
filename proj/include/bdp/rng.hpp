// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so results do not depend on thread count or
// evaluation order.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bdp::rng {

/// SplitMix64 finaliser, used to derive Philox keys from (seed, stream).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Counter domains. Grid increments use the line index in word 2 and the
/// grid domain in word 3; sequential streams use the sequential domain.
enum class Domain : std::uint32_t { grid = 0, sequential = 1, refinement = 2, initial = 3 };

/// Key derived from a 64-bit seed and a 64-bit stream id.
constexpr Key derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ull));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

/// Uniform on the open interval (0, 1) with 52 random bits. With 53 bits the
/// top value (2^53 - 1/2) 2^-53 rounds to 1.0.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Inverse of the standard normal CDF. Rational approximation (Acklam)
/// polished by one Halley step against erfc, giving close to full double
/// precision on (0, 1).
inline double normal_quantile(double p) noexcept {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  constexpr double kSqrt2Pi = 2.50662827463100050242;
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

/// Two standard normal draws from one Philox block.
inline std::array<double, 2> normal_pair(const Counter& ctr, const Key& key) noexcept {
  const Counter out = philox4x32(ctr, key);
  const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {normal_quantile(to_open_unit(w0)), normal_quantile(to_open_unit(w1))};
}

/// Sequential engine over one (seed, stream, domain). Satisfies
/// UniformRandomBitGenerator, and additionally hands out uniforms, normals,
/// exponentials and gamma variates with fixed, library-independent algorithms.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream, Domain domain = Domain::sequential) noexcept
      : key_(derive_key(seed, stream)), domain_(static_cast<std::uint32_t>(domain)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  double uniform() noexcept { return to_open_unit((*this)()); }

  double normal() noexcept { return normal_quantile(uniform()); }

  /// Exponential with the given mean.
  double exponential(double mean) noexcept { return -mean * std::log(uniform()); }

  /// Gamma(shape, 1) via Marsaglia and Tsang; shape >= 1.
  double gamma(double shape) noexcept {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  void refill() noexcept {
    const Counter out = philox4x32({static_cast<std::uint32_t>(counter_),
                                    static_cast<std::uint32_t>(counter_ >> 32), 0u, domain_},
                                   key_);
    ++counter_;
    buffer_[1] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    buffer_[0] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    buffered_ = 2;
  }

  Key key_;
  std::uint32_t domain_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace bdp::rng
