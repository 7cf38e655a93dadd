#pragma once

#include "hairsplat/core/error.hpp"
#include "hairsplat/core/rotation.hpp"
#include "hairsplat/core/types.hpp"

namespace hairsplat {

/// Sigma = R S S^T R^T with S = diag(s).
inline Mat3 build_covariance(const Vec3& s, const Quat& q) {
  require_input(s.minCoeff() > 0, "build_covariance: scales must be positive");
  const Mat3 r = quat_to_rot(q);
  return r * s.cwiseProduct(s).asDiagonal() * r.transpose();
}

/// Index of the largest scale, ties broken by the lowest axis.
inline int argmax_scale(const Vec3& s) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (s[i] > s[k]) k = i;
  return k;
}

}  // namespace hairsplat
