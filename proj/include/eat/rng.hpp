#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace eat {

// Deterministic random source. Only the raw mt19937_64 word stream is
// consumed; the float/normal constructions are spelled out here so results
// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t raw() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n), n >= 1
  uint64_t below(uint64_t n) {
    const uint64_t limit = (UINT64_MAX / n) * n;
    uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

  // standard normal via Box-Muller with a cached spare
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // normal(0, stddev) redrawn until within two standard deviations
  double trunc_normal(double stddev) {
    double v;
    do {
      v = normal();
    } while (std::fabs(v) > 2.0);
    return v * stddev;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace eat
