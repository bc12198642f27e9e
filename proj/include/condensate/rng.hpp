#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace condensate {

// splitmix64 finalizer, used to spread structured seed material
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Child seed for replica `index` of a run with the given master seed.
// Replica streams must not depend on how many replicas run or in which
// order, so each one is derived independently from (master, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * 0x9e3779b97f4a7c15ull);
}

// Random stream built on mt19937_64. The raw engine output sequence is
// pinned by the C++ standard, but std::*_distribution is not, and runs
// must produce byte-identical output across toolchains. All sampling is
// therefore done by hand from the raw 64-bit stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform on [0,1), 53-bit mantissa
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform on (0,1], safe to pass to log()
  double uniform_pos() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // standard normal via the Marsaglia polar method; the second variate of
  // each accepted pair is cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Beta(1, theta) by inverse transform: 1 - W^(1/theta), W uniform on (0,1].
  // Written with expm1 so small theta keeps full precision near 1.
  double beta1(double theta) {
    return -std::expm1(std::log(uniform_pos()) / theta);
  }

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze, with the usual power-of-a-
  // uniform boost below shape 1. Rejection, so the draw count varies.
  double gamma_shape(double shape) {
    if (shape < 1.0) {
      return gamma_shape(shape + 1.0) *
             std::pow(uniform_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v;
    }
  }

  // Poisson(mean): product-of-uniforms inversion below 10, Hormann's PTRS
  // transformed rejection above. Both are exact samplers.
  long long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) {
      const double floor_p = std::exp(-mean);
      long long k = 0;
      double p = 1.0;
      for (;;) {
        p *= uniform_pos();
        if (p <= floor_p) return k;
        ++k;
      }
    }
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * log_mean - mean - std::lgamma(kf + 1.0))
        return static_cast<long long>(kf);
    }
  }

  // exactly uniform integer on [0, n), rejection on the top sliver
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x;
    do {
      x = eng_();
    } while (x < min);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace condensate
