// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace smg {

// Deterministic random source used for every stochastic choice in the
// library. mt19937_64 is fully specified by the standard, and the derived
// draws below avoid std::*_distribution, so a given seed produces the same
// stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= min) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard Gumbel noise, clamped away from the log(0) singularities.
  double gumbel() {
    double u = uniform();
    if (u < 1e-16) u = 1e-16;
    if (u > 1.0 - 1e-16) u = 1.0 - 1e-16;
    return -std::log(-std::log(u));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace smg
