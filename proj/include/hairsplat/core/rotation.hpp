#pragma once

#include <array>
#include <cmath>

#include "hairsplat/core/error.hpp"
#include "hairsplat/core/types.hpp"

namespace hairsplat {

template <typename T>
Mat3T<T> skew(const Vec3T<T>& v) {
  Mat3T<T> m;
  m << T(0), -v.z(), v.y(), v.z(), T(0), -v.x(), -v.y(), v.x(), T(0);
  return m;
}

/// Rotation matrix of a quaternion, normalized internally.
template <typename T>
Mat3T<T> quat_to_rot(const QuatT<T>& q) {
  const T n = q.norm();
  require_input(n > T(0), "quat_to_rot: zero quaternion");
  QuatT<T> u = q;
  u.coeffs() /= n;
  return u.toRotationMatrix();
}

inline Mat3 quat_to_rot(Scalar w, Scalar x, Scalar y, Scalar z) {
  return quat_to_rot(Quat(w, x, y, z));
}

/// dR/dq for a unit quaternion q = (w,x,y,z), entries treated independently.
/// Chain through normalization separately when q is unnormalized.
inline std::array<Mat3, 4> rotation_quat_derivatives(const Quat& q) {
  const Scalar w = q.w(), x = q.x(), y = q.y(), z = q.z();
  std::array<Mat3, 4> d;
  d[0] << 0, -2 * z, 2 * y, 2 * z, 0, -2 * x, -2 * y, 2 * x, 0;
  d[1] << 0, 2 * y, 2 * z, 2 * y, -4 * x, -2 * w, 2 * z, 2 * w, -4 * x;
  d[2] << -4 * y, 2 * x, 2 * w, 2 * x, 0, 2 * z, -2 * w, 2 * z, -4 * y;
  d[3] << -4 * z, -2 * w, 2 * x, 2 * w, -4 * z, 2 * y, 2 * x, 2 * y, 0;
  return d;
}

/// Jacobian of q/|q| at q, as a 4x4 matrix.
inline Mat4 quat_normalize_jacobian(const Vec4& q) {
  const Scalar n = q.norm();
  require_input(n > 0, "quat_normalize_jacobian: zero quaternion");
  const Vec4 u = q / n;
  return (Mat4::Identity() - u * u.transpose()) / n;
}

/// exp([w]x): Rodrigues formula with Taylor fallback near zero.
inline Mat3 exp_so3(const Vec3& w) {
  const Scalar t2 = w.squaredNorm();
  const Scalar t = std::sqrt(t2);
  Scalar a, b;  // sin(t)/t, (1-cos(t))/t^2
  if (t < 1e-6) {
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = skew(w);
  return Mat3::Identity() + a * k + b * k * k;
}

/// Left Jacobian of SO(3): exp([w + d]x) ~ exp([Jl(w) d]x) exp([w]x).
inline Mat3 so3_left_jacobian(const Vec3& w) {
  const Scalar t2 = w.squaredNorm();
  const Scalar t = std::sqrt(t2);
  Scalar b, c;  // (1-cos t)/t^2, (t - sin t)/t^3
  if (t < 1e-6) {
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    b = (1.0 - std::cos(t)) / t2;
    c = (t - std::sin(t)) / (t2 * t);
  }
  const Mat3 k = skew(w);
  return Mat3::Identity() + b * k + c * k * k;
}

/// Quaternion rotating the x-axis onto unit direction d.
/// Near d = -x the half-way construction degenerates; that branch composes a
/// fixed 180-degree rotation about z with the rotation from -x to d.
inline Quat rotation_from_x_axis(const Vec3& d) {
  if (1.0 + d.x() > 1e-6) {
    Vec4 u(1.0 + d.x(), 0.0, -d.z(), d.y());
    u.normalize();
    return Quat(u[0], u[1], u[2], u[3]);
  }
  Vec4 u(1.0 - d.x(), 0.0, d.z(), -d.y());
  u.normalize();
  // (w,x,y,z) * quat(0,0,0,1) = (-z, y, -x, w)
  return Quat(-u[3], u[2], -u[1], u[0]);
}

/// Jacobian of rotation_from_x_axis wrt the unit direction, rows = (w,x,y,z).
inline Eigen::Matrix<Scalar, 4, 3> rotation_from_x_axis_jacobian(const Vec3& d) {
  Eigen::Matrix<Scalar, 4, 3> du;
  Vec4 u;
  bool flipped = false;
  if (1.0 + d.x() > 1e-6) {
    u = Vec4(1.0 + d.x(), 0.0, -d.z(), d.y());
    du << 1, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 0;
  } else {
    flipped = true;
    u = Vec4(1.0 - d.x(), 0.0, d.z(), -d.y());
    du << -1, 0, 0, 0, 0, 0, 0, 0, 1, 0, -1, 0;
  }
  const Scalar n = u.norm();
  const Vec4 un = u / n;
  Eigen::Matrix<Scalar, 4, 3> j = (Mat4::Identity() - un * un.transpose()) / n * du;
  if (!flipped) return j;
  Eigen::Matrix<Scalar, 4, 3> out;
  out.row(0) = -j.row(3);
  out.row(1) = j.row(2);
  out.row(2) = -j.row(1);
  out.row(3) = j.row(0);
  return out;
}

}  // namespace hairsplat
