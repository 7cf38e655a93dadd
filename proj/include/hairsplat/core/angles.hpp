#pragma once

#include <cmath>

#include "hairsplat/core/types.hpp"

namespace hairsplat {

inline constexpr Scalar kPi = 3.14159265358979323846;

/// Reduce an angle to [0, pi).
inline Scalar wrap_mod_pi(Scalar a) {
  Scalar r = std::fmod(a, kPi);
  if (r < 0) r += kPi;
  if (r >= kPi) r = 0;  // fmod rounding at the seam
  return r;
}

/// Distance between undirected lines at angles a and b, in [0, pi/2].
inline Scalar angular_distance_undirected(Scalar a, Scalar b) {
  Scalar d = std::abs(wrap_mod_pi(a) - wrap_mod_pi(b));
  return std::min(d, kPi - d);
}

/// Sign of d(angular_distance_undirected)/da at (a, b); undefined at the
/// branch points d = 0 and d = pi/2, where 0 is returned.
inline Scalar angular_distance_grad_a(Scalar a, Scalar b) {
  const Scalar aw = wrap_mod_pi(a), bw = wrap_mod_pi(b);
  const Scalar d = aw - bw;
  const Scalar ad = std::abs(d);
  if (ad < 1e-300 || std::abs(ad - kPi * 0.5) < 1e-300) return 0;
  if (ad < kPi - ad) return d > 0 ? 1.0 : -1.0;
  return d > 0 ? -1.0 : 1.0;
}

/// Undirected angle as a doubled-angle vector (cos 2a, sin 2a).
inline Vec2 doubled_angle(Scalar a) { return Vec2(std::cos(2 * a), std::sin(2 * a)); }

/// Decode a blended doubled-angle vector back to [0, pi).
inline Scalar decode_doubled_angle(const Vec2& u) {
  return wrap_mod_pi(0.5 * std::atan2(u.y(), u.x()));
}

inline Scalar deg_to_rad(Scalar d) { return d * kPi / 180.0; }
inline Scalar rad_to_deg(Scalar r) { return r * 180.0 / kPi; }

}  // namespace hairsplat
