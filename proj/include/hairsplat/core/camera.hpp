#pragma once

#include "hairsplat/core/error.hpp"
#include "hairsplat/core/rotation.hpp"
#include "hairsplat/core/types.hpp"

namespace hairsplat {

struct RigidTransform {
  Mat3 rot;
  Vec3 trans;

  Vec3 apply(const Vec3& x) const { return rot * x + trans; }
};

/// Pinhole camera: fixed intrinsics, initial world-to-camera pose and a
/// learnable 6-DoF pose residual (axis-angle + translation, camera frame).
struct Camera {
  Scalar fx = 1, fy = 1, cx = 0, cy = 0;
  int width = 0, height = 0;
  Mat3 rot = Mat3::Identity();   // initial world-to-camera rotation
  Vec3 trans = Vec3::Zero();     // initial translation
  Vec3 res_omega = Vec3::Zero();
  Vec3 res_trans = Vec3::Zero();
  Scalar near = 1e-3;

  void validate() const {
    require_input(fx > 0 && fy > 0, "camera: focal lengths must be positive");
    require_input(width > 0 && height > 0, "camera: empty image");
  }
};

/// Effective world-to-camera transform: the residual left-composes the
/// initial pose, so x_cam = exp([omega]x) (R0 x + t0) + dt.
inline RigidTransform apply_camera_residual(const Camera& cam) {
  const Mat3 rd = exp_so3(cam.res_omega);
  return {rd * cam.rot, rd * cam.trans + cam.res_trans};
}

inline Vec3 camera_center(const Camera& cam) {
  const RigidTransform t = apply_camera_residual(cam);
  return -t.rot.transpose() * t.trans;
}

struct Projection {
  Vec2 pixel = Vec2::Zero();
  Scalar depth = 0;
  bool culled = true;
};

inline Projection project_cam_point(const Camera& cam, const Vec3& x_cam) {
  Projection p;
  p.depth = x_cam.z();
  if (x_cam.z() <= cam.near) return p;
  p.culled = false;
  p.pixel = Vec2(cam.fx * x_cam.x() / x_cam.z() + cam.cx, cam.fy * x_cam.y() / x_cam.z() + cam.cy);
  return p;
}

inline Projection project_point(const Camera& cam, const Vec3& x_world) {
  return project_cam_point(cam, apply_camera_residual(cam).apply(x_world));
}

/// d pixel / d x_cam at a camera-frame point.
inline Mat23 projection_jacobian_cam(const Camera& cam, const Vec3& x_cam) {
  const Scalar z = x_cam.z(), iz = 1.0 / z, iz2 = iz * iz;
  Mat23 j;
  j << cam.fx * iz, 0, -cam.fx * x_cam.x() * iz2, 0, cam.fy * iz, -cam.fy * x_cam.y() * iz2;
  return j;
}

/// d pixel / d x_cam evaluated at the camera-frame image of a world point.
inline Mat23 projection_jacobian(const Camera& cam, const Vec3& x_world) {
  const Vec3 x_cam = apply_camera_residual(cam).apply(x_world);
  require_input(x_cam.z() > cam.near, "projection_jacobian: point behind near plane");
  return projection_jacobian_cam(cam, x_cam);
}

}  // namespace hairsplat
