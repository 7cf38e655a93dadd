#pragma once

#include <vector>

#include "hairsplat/core/covariance.hpp"
#include "hairsplat/core/error.hpp"
#include "hairsplat/core/types.hpp"

namespace hairsplat {

/// Activated Gaussian scene, the renderer's input: scales are positive,
/// quaternions unit, opacity/label in (0,1], confidence positive. SH
/// coefficients are stored flat, sh.middleCols(i * n_sh, n_sh) per primitive.
struct GaussianCloud {
  Mat3X mean;
  Mat3X scale;
  Mat4X quat;  // rows w,x,y,z
  VecX opacity;
  VecX label;
  VecX tau;
  MatX sh;  // 3 x (n_sh * count)
  int sh_degree = 1;

  /// Optional per-primitive orientation override (unit world vectors).
  /// When present the projected orientation uses it instead of the
  /// covariance principal axis; strand scenes set it to segment directions.
  Mat3X axis_override;

  int count() const { return static_cast<int>(mean.cols()); }
  int n_sh() const { return (sh_degree + 1) * (sh_degree + 1); }
  bool has_axis_override() const { return axis_override.cols() == mean.cols() && count() > 0; }

  Quat quat_at(int i) const { return Quat(quat(0, i), quat(1, i), quat(2, i), quat(3, i)); }

  SHCoeffs sh_at(int i) const {
    SHCoeffs c;
    c.c = sh.middleCols(static_cast<Eigen::Index>(i) * n_sh(), n_sh());
    return c;
  }

  void resize(int n, int degree) {
    sh_degree = degree;
    mean = Mat3X::Zero(3, n);
    scale = Mat3X::Ones(3, n);
    quat = Mat4X::Zero(4, n);
    quat.row(0).setOnes();
    opacity = VecX::Ones(n);
    label = VecX::Ones(n);
    tau = VecX::Ones(n);
    sh = MatX::Zero(3, static_cast<Eigen::Index>(n) * sh_num_basis_cols());
  }

 private:
  Eigen::Index sh_num_basis_cols() const { return (sh_degree + 1) * (sh_degree + 1); }
};

/// World-frame axis of largest activated scale; ties go to the lowest axis.
inline Vec3 principal_axis(const Vec3& scale, const Quat& q) {
  const int k = argmax_scale(scale);
  return quat_to_rot(q).col(k);
}

inline Vec3 principal_axis(const GaussianCloud& cloud, int i) {
  return principal_axis(cloud.scale.col(i), cloud.quat_at(i));
}

/// Gradients wrt the activated cloud parameters, same shapes as the cloud.
struct CloudGrads {
  Mat3X d_mean;
  Mat3X d_scale;
  Mat4X d_quat;
  VecX d_opacity;
  VecX d_label;
  VecX d_tau;
  MatX d_sh;
  Mat3X d_axis;

  static CloudGrads zeros(const GaussianCloud& cloud) {
    CloudGrads g;
    const int n = cloud.count();
    g.d_mean = Mat3X::Zero(3, n);
    g.d_scale = Mat3X::Zero(3, n);
    g.d_quat = Mat4X::Zero(4, n);
    g.d_opacity = VecX::Zero(n);
    g.d_label = VecX::Zero(n);
    g.d_tau = VecX::Zero(n);
    g.d_sh = MatX::Zero(3, cloud.sh.cols());
    g.d_axis = Mat3X::Zero(3, n);
    return g;
  }

  void add(const CloudGrads& o) {
    d_mean += o.d_mean;
    d_scale += o.d_scale;
    d_quat += o.d_quat;
    d_opacity += o.d_opacity;
    d_label += o.d_label;
    d_tau += o.d_tau;
    d_sh += o.d_sh;
    d_axis += o.d_axis;
  }

  bool all_finite() const {
    return d_mean.allFinite() && d_scale.allFinite() && d_quat.allFinite() &&
           d_opacity.allFinite() && d_label.allFinite() && d_tau.allFinite() && d_sh.allFinite() &&
           d_axis.allFinite();
  }
};

}  // namespace hairsplat
