#pragma once

#include "hairsplat/core/error.hpp"
#include "hairsplat/core/types.hpp"

namespace hairsplat {

// Real SH basis constants, splatting convention.
namespace sh_const {
inline constexpr Scalar k0 = 0.28209479177387814;
inline constexpr Scalar k1 = 0.4886025119029199;
inline constexpr Scalar k2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                                 -1.0925484305920792, 0.5462742152960396};
inline constexpr Scalar k3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                                 0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                                 -0.5900435899266435};
}  // namespace sh_const

inline int sh_num_basis(int degree) { return (degree + 1) * (degree + 1); }

/// Evaluates the real SH basis at a unit direction; `basis` must hold
/// sh_num_basis(degree) entries.
inline void sh_basis(int degree, const Vec3& dir, Scalar* basis) {
  using namespace sh_const;
  const Scalar x = dir.x(), y = dir.y(), z = dir.z();
  basis[0] = k0;
  if (degree < 1) return;
  basis[1] = -k1 * y;
  basis[2] = k1 * z;
  basis[3] = -k1 * x;
  if (degree < 2) return;
  const Scalar xx = x * x, yy = y * y, zz = z * z;
  basis[4] = k2[0] * x * y;
  basis[5] = k2[1] * y * z;
  basis[6] = k2[2] * (2 * zz - xx - yy);
  basis[7] = k2[3] * x * z;
  basis[8] = k2[4] * (xx - yy);
  if (degree < 3) return;
  basis[9] = k3[0] * y * (3 * xx - yy);
  basis[10] = k3[1] * x * y * z;
  basis[11] = k3[2] * y * (4 * zz - xx - yy);
  basis[12] = k3[3] * z * (2 * zz - 3 * xx - 3 * yy);
  basis[13] = k3[4] * x * (4 * zz - xx - yy);
  basis[14] = k3[5] * z * (xx - yy);
  basis[15] = k3[6] * x * (xx - 3 * yy);
}

/// d basis / d dir, one row per basis function.
inline void sh_basis_dir_grad(int degree, const Vec3& dir, Vec3* grad) {
  using namespace sh_const;
  const Scalar x = dir.x(), y = dir.y(), z = dir.z();
  grad[0].setZero();
  if (degree < 1) return;
  grad[1] = Vec3(0, -k1, 0);
  grad[2] = Vec3(0, 0, k1);
  grad[3] = Vec3(-k1, 0, 0);
  if (degree < 2) return;
  grad[4] = k2[0] * Vec3(y, x, 0);
  grad[5] = k2[1] * Vec3(0, z, y);
  grad[6] = k2[2] * Vec3(-2 * x, -2 * y, 4 * z);
  grad[7] = k2[3] * Vec3(z, 0, x);
  grad[8] = k2[4] * Vec3(2 * x, -2 * y, 0);
  if (degree < 3) return;
  const Scalar xx = x * x, yy = y * y, zz = z * z;
  grad[9] = k3[0] * Vec3(6 * x * y, 3 * xx - 3 * yy, 0);
  grad[10] = k3[1] * Vec3(y * z, x * z, x * y);
  grad[11] = k3[2] * Vec3(-2 * x * y, 4 * zz - xx - 3 * yy, 8 * y * z);
  grad[12] = k3[3] * Vec3(-6 * x * z, -6 * y * z, 6 * zz - 3 * xx - 3 * yy);
  grad[13] = k3[4] * Vec3(4 * zz - 3 * xx - yy, -2 * x * y, 8 * x * z);
  grad[14] = k3[5] * Vec3(2 * x * z, -2 * y * z, xx - yy);
  grad[15] = k3[6] * Vec3(3 * xx - 3 * yy, -6 * x * y, 0);
}

/// View-dependent rgb from SH coefficients at a unit direction.
inline Vec3 sh_eval(const SHCoeffs& coeffs, const Vec3& dir) {
  require_input(std::abs(dir.norm() - 1.0) < 1e-6, "sh_eval: direction not unit length");
  const int degree = coeffs.degree();
  Scalar basis[16];
  sh_basis(degree, dir, basis);
  Vec3 rgb = Vec3::Zero();
  for (int m = 0; m < coeffs.num_basis(); ++m) rgb += coeffs.c.col(m) * basis[m];
  return rgb;
}

}  // namespace hairsplat
