#pragma once

#include <string>
#include <vector>

#include "hairsplat/core/rng.hpp"
#include "hairsplat/model/gaussian_cloud.hpp"

namespace hairsplat {

/// Raw-space gradients for every trainable Gaussian parameter.
struct GradientBuffers {
  Mat3X d_mean;
  Mat3X d_log_scale;
  Mat4X d_quat_raw;
  VecX d_opacity_logit;
  VecX d_label_logit;
  VecX d_log_tau;
  MatX d_sh;
};

struct DensifyConfig {
  Scalar grad_threshold = 2e-4;      // mean accumulated screen-space gradient
  Scalar min_opacity = 0.005;        // prune below
  Scalar split_scale_divisor = 1.6;  // children scale factor on split
  Scalar size_threshold_frac = 0.01; // of scene extent: clone below, split above
  int max_count = 50000;
};

struct DensifyStats {
  int cloned = 0, split = 0, pruned = 0;
};

/// Trainable unstructured Gaussian scene. Stores raw parameters and maps
/// activated-space gradients back through the activations.
class GaussianModel {
 public:
  Mat3X mean;          // world, meters
  Mat3X log_scale;
  Mat4X quat_raw;      // unnormalized
  VecX opacity_logit;
  VecX label_logit;
  VecX log_tau;
  MatX sh;             // 3 x (n_sh * count)
  int sh_degree = 1;

  // Screen-space positional gradient statistics for densification.
  VecX grad_accum;
  VecX grad_count;

  int count() const { return static_cast<int>(mean.cols()); }
  int n_sh() const { return (sh_degree + 1) * (sh_degree + 1); }

  GaussianCloud activate() const;

  /// Chains activated-space gradients through exp/sigmoid/normalize.
  GradientBuffers backward(const CloudGrads& g) const;

  /// One Gaussian per point: isotropic scale from the mean distance to the 3
  /// nearest neighbors, opacity 0.1, label 0.5, confidence 1.
  static GaussianModel init_from_points(const Mat3X& points, const Mat3X& colors, int sh_degree);

  void accumulate_grad_stats(const CloudGrads& g, const std::vector<bool>& visible,
                             const Mat2X& screen_grads);
  void reset_grad_stats();

  DensifyStats densify_and_prune(const DensifyConfig& cfg, Scalar scene_extent, Rng& rng);

  /// Clamp opacities down to `value` (periodic reset).
  void reset_opacity(Scalar value);

  void save_checkpoint(const std::string& path) const;
  static GaussianModel load_checkpoint(const std::string& path);

 private:
  void append(const GaussianModel& extra);
  void keep(const std::vector<int>& indices);
};

inline Scalar sigmoid(Scalar x) { return 1.0 / (1.0 + std::exp(-x)); }
inline Scalar logit(Scalar p) { return std::log(p / (1.0 - p)); }

}  // namespace hairsplat
