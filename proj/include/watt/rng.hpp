#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "watt/error.hpp"

// Counter-based pseudo-random generation.
//
// The generator is a SplitMix64-style counter design: the k-th output is
// mix64(key + k * golden), where mix64 is the SplitMix64 finalizer. Streams
// are split by re-keying: child key = mix64(parent key ^ mix64(stream id ^
// salt)). Because every output is a pure function of (key, counter), results
// are independent of thread scheduling; any (seed, stream path, draw index)
// always yields the same value.
//
// Normal variates use the inverse-CDF method (Wichura's AS 241, PPND16) on a
// 53-bit uniform shifted into the open interval (0,1). This makes normal
// draws a fixed one-uniform-per-variate transformation, so sequences stay
// aligned across platforms and refactorings.

namespace watt {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Upper tail 1 - Phi(x), accurate for large x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(errc::invalid_argument, "normal_quantile requires p in [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_(detail::mix64(seed ^ 0xA5A5A5A55A5A5A5AULL)), counter_(0) {}

  // Child stream keyed by (this stream, id); does not advance this stream.
  CounterRng split(std::uint64_t stream_id) const {
    CounterRng child(0);
    child.key_ = detail::mix64(key_ ^ detail::mix64(stream_id ^ 0xC2B2AE3D27D4EB4FULL));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t next_u64() {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  // Uniform on (0,1): 53-bit mantissa, offset by half an ulp so 0 is excluded.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw Error(errc::invalid_argument, "next_below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  double next_normal() { return normal_quantile(next_unit()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace watt
