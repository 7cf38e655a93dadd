#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hairsplat/core/angles.hpp"
#include "hairsplat/core/types.hpp"

namespace hairsplat {

/// Deterministic RNG: mt19937_64 with explicit uniform/normal transforms so
/// streams do not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1).
  Scalar uniform() { return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) {  // [0, n)
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  Scalar normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    Scalar u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2 * kPi * u2);
  }

  Vec3 normal3() { return Vec3(normal(), normal(), normal()); }

  Vec3 unit_vec3() {
    Vec3 v = normal3();
    while (v.norm() < 1e-12) v = normal3();
    return v.normalized();
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_int(static_cast<int>(i))]);
  }

 private:
  std::mt19937_64 engine_;
  Scalar spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace hairsplat
