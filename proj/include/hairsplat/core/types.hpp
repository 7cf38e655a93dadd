#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hairsplat {

using Scalar = double;

template <typename T> using Vec2T = Eigen::Matrix<T, 2, 1>;
template <typename T> using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T> using Vec4T = Eigen::Matrix<T, 4, 1>;
template <typename T> using Mat2T = Eigen::Matrix<T, 2, 2>;
template <typename T> using Mat3T = Eigen::Matrix<T, 3, 3>;
template <typename T> using Mat4T = Eigen::Matrix<T, 4, 4>;
template <typename T> using Mat23T = Eigen::Matrix<T, 2, 3>;
template <typename T> using QuatT = Eigen::Quaternion<T>;

using Vec2 = Vec2T<Scalar>;
using Vec3 = Vec3T<Scalar>;
using Vec4 = Vec4T<Scalar>;
using Mat2 = Mat2T<Scalar>;
using Mat3 = Mat3T<Scalar>;
using Mat4 = Mat4T<Scalar>;
using Mat23 = Mat23T<Scalar>;
using Quat = QuatT<Scalar>;

using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Mat2X = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
using Mat3X = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;
using Mat4X = Eigen::Matrix<Scalar, 4, Eigen::Dynamic>;

/// Image plane indexed as (y, x).
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline Plane zero_plane(int width, int height) { return Plane::Zero(height, width); }

/// Per-channel spherical harmonic coefficients, rows = rgb, cols = basis.
struct SHCoeffs {
  Mat3X c;

  SHCoeffs() = default;
  explicit SHCoeffs(int degree) { c = Mat3X::Zero(3, (degree + 1) * (degree + 1)); }

  int num_basis() const { return static_cast<int>(c.cols()); }
  int degree() const {
    int n = num_basis(), d = 0;
    while ((d + 1) * (d + 1) < n) ++d;
    return d;
  }
};

}  // namespace hairsplat
