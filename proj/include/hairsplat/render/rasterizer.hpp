#pragma once

#include <array>
#include <vector>

#include "hairsplat/core/camera.hpp"
#include "hairsplat/model/gaussian_cloud.hpp"

namespace hairsplat {

struct RenderConfig {
  int tile_size = 16;
  Scalar cond_eps = 0.3;        // px^2 added to the screen covariance diagonal
  Scalar alpha_clamp = 0.99;
  Scalar alpha_min = 1.0 / 255.0;  // contributions below are skipped
  Scalar t_min = 1e-4;             // stop compositing once transmittance drops below
  Scalar coverage_sigma = 3.0;     // tile coverage radius in sigmas
  Scalar aniso_ratio = 1.05;       // dominant-axis ratio for orientation validity
  Scalar u_valid_min = 1e-3;       // blended doubled-angle vector validity
  Vec3 background = Vec3::Zero();
  bool composite_background = true;
};

struct ProjectedGaussian {
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();      // conditioned
  Mat2 inv_cov2d = Mat2::Zero();
  Scalar depth = 0;
  Scalar radius = 0;              // coverage radius, pixels
  Scalar beta = 0;                // projected orientation, [0, pi)
  bool orient_valid = false;
  bool beta_from_cov = false;     // major-axis fallback for near-isotropic primitives
  bool culled = true;
  Vec3 rgb = Vec3::Zero();        // sh_eval + 0.5, clamped to [0,1]
  std::array<bool, 3> rgb_clamped = {false, false, false};
  Scalar opacity = 0, label = 0, tau = 0;
};

/// Per-pixel blended channels (Eqs. of the alpha-compositing model).
struct RenderTargets {
  int width = 0, height = 0;
  std::array<Plane, 3> color;  // includes background compositing
  Plane label, conf, sil;
  Plane u0, u1;                // blended doubled-angle vector
  Plane beta;                  // decoded angle, [0, pi)
  Plane valid;                 // 1 where |u| > u_valid_min
  Plane t_final;
};

struct TileBins {
  int tiles_x = 0, tiles_y = 0;
  std::vector<std::vector<int>> lists;  // depth-sorted indices per tile
};

/// Everything the backward pass needs to replay the forward walk.
struct RenderContext {
  RenderConfig config;
  int width = 0, height = 0;
  int n_gaussians = 0;
  std::vector<ProjectedGaussian> projected;
  std::vector<char> touched;  // binned into at least one tile
  TileBins bins;
  std::array<Plane, 8> content;  // channel sums without background
  RenderTargets targets;
};

/// Upstream per-pixel loss gradients for each rendered channel.
struct PixelGrads {
  std::array<Plane, 3> d_color;
  Plane d_label, d_conf, d_sil;
  Plane d_u0, d_u1;

  static PixelGrads zeros(int width, int height);
};

struct RenderBackwardResult {
  CloudGrads cloud;
  Vec3 d_omega = Vec3::Zero();  // camera residual gradients
  Vec3 d_dt = Vec3::Zero();
  Mat2X screen_grads;           // per-gaussian |dL/dmean2d| source for densification
};

ProjectedGaussian project_gaussian(const GaussianCloud& cloud, int index, const Camera& cam,
                                   const RenderConfig& config);

/// Tiles overlapped by the axis-aligned square of half-width `radius`
/// centered on each projected mean; lists sorted by (depth, index).
TileBins sort_and_bin(const std::vector<ProjectedGaussian>& projected, int width, int height,
                      const RenderConfig& config);

RenderContext render_forward(const GaussianCloud& cloud, const Camera& cam,
                             const RenderConfig& config);

/// Exact adjoint of render_forward; depth ordering and tile assignment are
/// treated as constant.
RenderBackwardResult render_backward(const GaussianCloud& cloud, const Camera& cam,
                                     const RenderContext& ctx, const PixelGrads& grads);

}  // namespace hairsplat
