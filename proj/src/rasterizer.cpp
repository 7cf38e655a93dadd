#include "hairsplat/render/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "hairsplat/core/angles.hpp"
#include "hairsplat/core/parallel.hpp"
#include "hairsplat/core/sh.hpp"

namespace hairsplat {

namespace {

Mat2 invert_spd2(const Mat2& m) {
  const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Mat2 inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

void eigenvalues_sym2(const Mat2& m, Scalar& lo, Scalar& hi) {
  const Scalar mid = 0.5 * (m(0, 0) + m(1, 1));
  const Scalar disc = std::sqrt(std::max(Scalar(0), 0.25 * (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) +
                                                        m(0, 1) * m(0, 1)));
  lo = mid - disc;
  hi = mid + disc;
}

// Ratio of the largest to the middle activated scale.
Scalar aniso_ratio3(const Vec3& s) {
  Vec3 sorted = s;
  std::sort(sorted.data(), sorted.data() + 3);
  return sorted[2] / std::max(sorted[1], Scalar(1e-300));
}

}  // namespace

ProjectedGaussian project_gaussian(const GaussianCloud& cloud, int index, const Camera& cam,
                                   const RenderConfig& config) {
  const Vec3 mu = cloud.mean.col(index);
  const Vec3 s = cloud.scale.col(index);
  const Quat q = cloud.quat_at(index);
  require_state(mu.allFinite() && s.allFinite() && q.coeffs().allFinite() &&
                    std::isfinite(cloud.opacity[index]) && std::isfinite(cloud.tau[index]) &&
                    std::isfinite(cloud.label[index]),
                "project_gaussian: non-finite parameter at gaussian " + std::to_string(index));

  ProjectedGaussian pg;
  const RigidTransform rt = apply_camera_residual(cam);
  const Vec3 x = rt.apply(mu);
  pg.depth = x.z();
  if (x.z() <= cam.near) return pg;  // culled
  pg.culled = false;

  pg.mean2d = Vec2(cam.fx * x.x() / x.z() + cam.cx, cam.fy * x.y() / x.z() + cam.cy);
  const Mat23 j = projection_jacobian_cam(cam, x);
  const Mat23 m = j * rt.rot;
  const Mat3 sigma = quat_to_rot(q) * s.cwiseProduct(s).asDiagonal() *
                     quat_to_rot(q).transpose();
  pg.cov2d = m * sigma * m.transpose();
  pg.cov2d(0, 0) += config.cond_eps;
  pg.cov2d(1, 1) += config.cond_eps;
  pg.inv_cov2d = invert_spd2(pg.cov2d);

  Scalar lo, hi;
  eigenvalues_sym2(pg.cov2d, lo, hi);
  pg.radius = config.coverage_sigma * std::sqrt(hi);

  // Orientation: projected principal axis for clearly anisotropic primitives,
  // the screen-covariance major axis otherwise; invalid when the conditioned
  // screen footprint has no dominant axis.
  const Scalar screen_ratio = std::sqrt(hi / std::max(lo, Scalar(1e-300)));
  if (screen_ratio < config.aniso_ratio) {
    pg.orient_valid = false;
  } else {
    pg.orient_valid = true;
    bool use_axis = aniso_ratio3(s) > config.aniso_ratio || cloud.has_axis_override();
    if (use_axis) {
      const Vec3 axis =
          cloud.has_axis_override() ? Vec3(cloud.axis_override.col(index)) : principal_axis(s, q);
      const Vec2 v2 = m * axis;
      if (v2.squaredNorm() < 1e-18) {
        use_axis = false;
      } else {
        pg.beta = wrap_mod_pi(std::atan2(v2.y(), v2.x()));
      }
    }
    if (!use_axis) {
      pg.beta_from_cov = true;
      pg.beta = wrap_mod_pi(
          0.5 * std::atan2(2 * pg.cov2d(0, 1), pg.cov2d(0, 0) - pg.cov2d(1, 1)));
    }
  }

  // View-dependent color.
  const Vec3 dir = (mu - camera_center(cam)).normalized();
  const Vec3 raw = sh_eval(cloud.sh_at(index), dir).array() + 0.5;
  for (int k = 0; k < 3; ++k) {
    pg.rgb[k] = std::clamp(raw[k], Scalar(0), Scalar(1));
    pg.rgb_clamped[static_cast<size_t>(k)] = raw[k] < 0 || raw[k] > 1;
  }
  pg.opacity = cloud.opacity[index];
  pg.label = cloud.label[index];
  pg.tau = cloud.tau[index];
  require_state(pg.mean2d.allFinite() && pg.cov2d.allFinite(),
                "project_gaussian: non-finite projection at gaussian " + std::to_string(index));
  return pg;
}

TileBins sort_and_bin(const std::vector<ProjectedGaussian>& projected, int width, int height,
                      const RenderConfig& config) {
  TileBins bins;
  const int ts = config.tile_size;
  bins.tiles_x = (width + ts - 1) / ts;
  bins.tiles_y = (height + ts - 1) / ts;
  bins.lists.assign(static_cast<size_t>(bins.tiles_x) * bins.tiles_y, {});

  for (int i = 0; i < static_cast<int>(projected.size()); ++i) {
    const ProjectedGaussian& pg = projected[static_cast<size_t>(i)];
    if (pg.culled) continue;
    const Scalar x0 = pg.mean2d.x() - pg.radius, x1 = pg.mean2d.x() + pg.radius;
    const Scalar y0 = pg.mean2d.y() - pg.radius, y1 = pg.mean2d.y() + pg.radius;
    if (x1 < 0 || y1 < 0 || x0 > width - 1 || y0 > height - 1) continue;
    const int tx0 = std::max(0, static_cast<int>(std::floor(x0 / ts)));
    const int tx1 = std::min(bins.tiles_x - 1, static_cast<int>(std::floor(x1 / ts)));
    const int ty0 = std::max(0, static_cast<int>(std::floor(y0 / ts)));
    const int ty1 = std::min(bins.tiles_y - 1, static_cast<int>(std::floor(y1 / ts)));
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        bins.lists[static_cast<size_t>(ty) * bins.tiles_x + tx].push_back(i);
  }

  for (auto& list : bins.lists) {
    std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
      const Scalar da = projected[static_cast<size_t>(a)].depth;
      const Scalar db = projected[static_cast<size_t>(b)].depth;
      if (da != db) return da < db;
      return a < b;
    });
  }
  return bins;
}

PixelGrads PixelGrads::zeros(int width, int height) {
  PixelGrads g;
  for (auto& p : g.d_color) p = zero_plane(width, height);
  g.d_label = zero_plane(width, height);
  g.d_conf = zero_plane(width, height);
  g.d_sil = zero_plane(width, height);
  g.d_u0 = zero_plane(width, height);
  g.d_u1 = zero_plane(width, height);
  return g;
}

RenderContext render_forward(const GaussianCloud& cloud, const Camera& cam,
                             const RenderConfig& config) {
  cam.validate();
  RenderContext ctx;
  ctx.config = config;
  ctx.width = cam.width;
  ctx.height = cam.height;
  ctx.n_gaussians = cloud.count();

  ctx.projected.resize(static_cast<size_t>(cloud.count()));
  parallel_for(cloud.count(),
               [&](int i) { ctx.projected[static_cast<size_t>(i)] = project_gaussian(cloud, i, cam, config); });
  ctx.bins = sort_and_bin(ctx.projected, ctx.width, ctx.height, config);
  ctx.touched.assign(static_cast<size_t>(cloud.count()), 0);
  for (const auto& list : ctx.bins.lists)
    for (int i : list) ctx.touched[static_cast<size_t>(i)] = 1;

  for (auto& p : ctx.content) p = zero_plane(ctx.width, ctx.height);
  ctx.targets.width = ctx.width;
  ctx.targets.height = ctx.height;
  ctx.targets.t_final = Plane::Ones(ctx.height, ctx.width);

  const int ts = config.tile_size;
  const int n_tiles = ctx.bins.tiles_x * ctx.bins.tiles_y;
  parallel_for(n_tiles, [&](int t) {
    const auto& list = ctx.bins.lists[static_cast<size_t>(t)];
    const int tx = t % ctx.bins.tiles_x, ty = t / ctx.bins.tiles_x;
    const int x_end = std::min(ctx.width, (tx + 1) * ts);
    const int y_end = std::min(ctx.height, (ty + 1) * ts);
    for (int y = ty * ts; y < y_end; ++y) {
      for (int x = tx * ts; x < x_end; ++x) {
        Scalar acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        Scalar trans = 1.0;
        for (int i : list) {
          const ProjectedGaussian& pg = ctx.projected[static_cast<size_t>(i)];
          const Scalar dx = x - pg.mean2d.x(), dy = y - pg.mean2d.y();
          const Scalar power = -0.5 * (pg.inv_cov2d(0, 0) * dx * dx +
                                       2 * pg.inv_cov2d(0, 1) * dx * dy +
                                       pg.inv_cov2d(1, 1) * dy * dy);
          if (power > 0 || power < -37.0) continue;
          const Scalar alpha_raw = pg.opacity * std::exp(power);
          if (alpha_raw < config.alpha_min) continue;
          const Scalar alpha = std::min(alpha_raw, config.alpha_clamp);
          const Scalar w = trans * alpha;
          acc[0] += w * pg.rgb[0];
          acc[1] += w * pg.rgb[1];
          acc[2] += w * pg.rgb[2];
          acc[3] += w * pg.label;
          acc[4] += w * pg.tau;
          acc[5] += w;
          if (pg.orient_valid) {
            acc[6] += w * std::cos(2 * pg.beta);
            acc[7] += w * std::sin(2 * pg.beta);
          }
          trans *= (1.0 - alpha);
          if (trans < config.t_min) break;
        }
        for (int ch = 0; ch < 8; ++ch) ctx.content[static_cast<size_t>(ch)](y, x) = acc[ch];
        ctx.targets.t_final(y, x) = trans;
      }
    }
  });

  for (int k = 0; k < 3; ++k) {
    ctx.targets.color[static_cast<size_t>(k)] = ctx.content[static_cast<size_t>(k)];
    if (config.composite_background)
      ctx.targets.color[static_cast<size_t>(k)] += ctx.targets.t_final * config.background[k];
  }
  ctx.targets.label = ctx.content[3];
  ctx.targets.conf = ctx.content[4];
  ctx.targets.sil = ctx.content[5];
  ctx.targets.u0 = ctx.content[6];
  ctx.targets.u1 = ctx.content[7];
  ctx.targets.beta = zero_plane(ctx.width, ctx.height);
  ctx.targets.valid = zero_plane(ctx.width, ctx.height);
  for (int y = 0; y < ctx.height; ++y) {
    for (int x = 0; x < ctx.width; ++x) {
      const Vec2 u(ctx.targets.u0(y, x), ctx.targets.u1(y, x));
      if (u.norm() > config.u_valid_min) {
        ctx.targets.valid(y, x) = 1;
        ctx.targets.beta(y, x) = decode_doubled_angle(u);
      }
    }
  }
  return ctx;
}

namespace {

// Blend-space gradient slots accumulated per (tile, list entry).
struct BlendGrad {
  Scalar mu[2] = {0, 0};
  Scalar p[3] = {0, 0, 0};  // inverse-covariance entries (a, b, c)
  Scalar o = 0;
  Scalar rgb[3] = {0, 0, 0};
  Scalar label = 0, tau = 0, beta = 0;

  void add(const BlendGrad& g) {
    mu[0] += g.mu[0];
    mu[1] += g.mu[1];
    for (int k = 0; k < 3; ++k) {
      p[k] += g.p[k];
      rgb[k] += g.rgb[k];
    }
    o += g.o;
    label += g.label;
    tau += g.tau;
    beta += g.beta;
  }
};

struct CameraAccum {
  Vec3 omega = Vec3::Zero();
  Vec3 dt = Vec3::Zero();
};

}  // namespace

RenderBackwardResult render_backward(const GaussianCloud& cloud, const Camera& cam,
                                     const RenderContext& ctx, const PixelGrads& grads) {
  require_state(ctx.n_gaussians == cloud.count(), "render_backward: scene size mismatch");
  require_state(ctx.width == cam.width && ctx.height == cam.height,
                "render_backward: image size mismatch");
  require_state(grads.d_label.rows() == ctx.height && grads.d_label.cols() == ctx.width,
                "render_backward: gradient size mismatch");
  const RenderConfig& config = ctx.config;

  // Phase 1: per-tile blend adjoint, replaying the forward walk.
  const int n_tiles = ctx.bins.tiles_x * ctx.bins.tiles_y;
  std::vector<size_t> offset(static_cast<size_t>(n_tiles) + 1, 0);
  for (int t = 0; t < n_tiles; ++t)
    offset[static_cast<size_t>(t) + 1] =
        offset[static_cast<size_t>(t)] + ctx.bins.lists[static_cast<size_t>(t)].size();
  std::vector<BlendGrad> records(offset.back());

  const int ts = config.tile_size;
  parallel_for(n_tiles, [&](int t) {
    const auto& list = ctx.bins.lists[static_cast<size_t>(t)];
    if (list.empty()) return;
    BlendGrad* rec = records.data() + offset[static_cast<size_t>(t)];
    const int tx = t % ctx.bins.tiles_x, ty = t / ctx.bins.tiles_x;
    const int x_end = std::min(ctx.width, (tx + 1) * ts);
    const int y_end = std::min(ctx.height, (ty + 1) * ts);
    for (int y = ty * ts; y < y_end; ++y) {
      for (int x = tx * ts; x < x_end; ++x) {
        Scalar up[8] = {grads.d_color[0](y, x), grads.d_color[1](y, x), grads.d_color[2](y, x),
                        grads.d_label(y, x),    grads.d_conf(y, x),     grads.d_sil(y, x),
                        grads.d_u0(y, x),       grads.d_u1(y, x)};
        Scalar d_tfinal = 0;
        if (config.composite_background)
          d_tfinal = up[0] * config.background[0] + up[1] * config.background[1] +
                     up[2] * config.background[2];
        bool any = d_tfinal != 0;
        for (Scalar u : up) any = any || u != 0;
        if (!any) continue;

        Scalar acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        Scalar trans = 1.0;
        const Scalar tfin = ctx.targets.t_final(y, x);
        for (size_t li = 0; li < list.size(); ++li) {
          const int i = list[li];
          const ProjectedGaussian& pg = ctx.projected[static_cast<size_t>(i)];
          const Scalar dx = x - pg.mean2d.x(), dy = y - pg.mean2d.y();
          const Scalar power = -0.5 * (pg.inv_cov2d(0, 0) * dx * dx +
                                       2 * pg.inv_cov2d(0, 1) * dx * dy +
                                       pg.inv_cov2d(1, 1) * dy * dy);
          if (power > 0 || power < -37.0) continue;
          const Scalar gval = std::exp(power);
          const Scalar alpha_raw = pg.opacity * gval;
          if (alpha_raw < config.alpha_min) continue;
          const bool clamped = alpha_raw > config.alpha_clamp;
          const Scalar alpha = clamped ? config.alpha_clamp : alpha_raw;
          const Scalar w = trans * alpha;

          const Scalar cos2b = pg.orient_valid ? std::cos(2 * pg.beta) : 0;
          const Scalar sin2b = pg.orient_valid ? std::sin(2 * pg.beta) : 0;
          const Scalar chan[8] = {pg.rgb[0], pg.rgb[1], pg.rgb[2], pg.label,
                                  pg.tau,    1.0,       cos2b,     sin2b};

          BlendGrad& g = rec[li];
          for (int k = 0; k < 3; ++k) g.rgb[k] += up[k] * w;
          g.label += up[3] * w;
          g.tau += up[4] * w;
          if (pg.orient_valid)
            g.beta += w * (-2 * sin2b * up[6] + 2 * cos2b * up[7]);

          Scalar d_alpha = 0;
          const Scalar inv_one_minus = 1.0 / (1.0 - alpha);
          for (int ch = 0; ch < 8; ++ch) {
            if (up[ch] == 0) continue;
            const Scalar after = acc[ch] + w * chan[ch];
            const Scalar suffix = ctx.content[static_cast<size_t>(ch)](y, x) - after;
            d_alpha += up[ch] * (trans * chan[ch] - suffix * inv_one_minus);
          }
          d_alpha -= d_tfinal * tfin * inv_one_minus;

          if (!clamped && d_alpha != 0) {
            g.o += d_alpha * gval;
            const Scalar d_power = d_alpha * alpha_raw;
            const Scalar px = pg.inv_cov2d(0, 0) * dx + pg.inv_cov2d(0, 1) * dy;
            const Scalar py = pg.inv_cov2d(0, 1) * dx + pg.inv_cov2d(1, 1) * dy;
            g.mu[0] += d_power * px;
            g.mu[1] += d_power * py;
            g.p[0] += d_power * (-0.5 * dx * dx);
            g.p[1] += d_power * (-dx * dy);
            g.p[2] += d_power * (-0.5 * dy * dy);
          }

          for (int ch = 0; ch < 8; ++ch) acc[ch] += w * chan[ch];
          trans *= (1.0 - alpha);
          if (trans < config.t_min) break;
        }
      }
    }
  });

  // Phase 2: fold tile records into per-gaussian slots, fixed tile order.
  std::vector<BlendGrad> per_gaussian(static_cast<size_t>(cloud.count()));
  for (int t = 0; t < n_tiles; ++t) {
    const auto& list = ctx.bins.lists[static_cast<size_t>(t)];
    const BlendGrad* rec = records.data() + offset[static_cast<size_t>(t)];
    for (size_t li = 0; li < list.size(); ++li)
      per_gaussian[static_cast<size_t>(list[li])].add(rec[li]);
  }

  // Phase 3: geometric adjoint per gaussian, deterministic camera reduction.
  RenderBackwardResult result;
  result.cloud = CloudGrads::zeros(cloud);
  result.screen_grads = Mat2X::Zero(2, cloud.count());

  const RigidTransform rt = apply_camera_residual(cam);
  const Mat3 w_eff = rt.rot;
  const Mat3 r_delta = exp_so3(cam.res_omega);
  const Mat3 jl = so3_left_jacobian(cam.res_omega);
  const Vec3 center = camera_center(cam);
  const int n_sh = cloud.n_sh();
  const int degree = cloud.sh_degree;

  CameraAccum cam_zero;
  CameraAccum cam_acc = parallel_reduce<CameraAccum>(
      cloud.count(), cam_zero,
      [&](int i, CameraAccum& acc) {
        const ProjectedGaussian& pg = ctx.projected[static_cast<size_t>(i)];
        if (pg.culled) return;
        const BlendGrad& bg = per_gaussian[static_cast<size_t>(i)];
        result.screen_grads(0, i) = bg.mu[0];
        result.screen_grads(1, i) = bg.mu[1];
        const bool any = bg.mu[0] != 0 || bg.mu[1] != 0 || bg.p[0] != 0 || bg.p[1] != 0 ||
                         bg.p[2] != 0 || bg.o != 0 || bg.rgb[0] != 0 || bg.rgb[1] != 0 ||
                         bg.rgb[2] != 0 || bg.label != 0 || bg.tau != 0 || bg.beta != 0;
        if (!any) return;

        const Vec3 mu = cloud.mean.col(i);
        const Vec3 s = cloud.scale.col(i);
        const Quat q = cloud.quat_at(i);
        const Vec3 u0 = cam.rot * mu + cam.trans;
        const Vec3 x = r_delta * u0 + cam.res_trans;
        const Scalar z = x.z();
        const Mat23 j = projection_jacobian_cam(cam, x);
        const Mat23 m = j * w_eff;
        const Mat3 r3 = quat_to_rot(q);
        const Vec3 s2 = s.cwiseProduct(s);
        const Mat3 sigma = r3 * s2.asDiagonal() * r3.transpose();

        result.cloud.d_opacity[i] = bg.o;
        result.cloud.d_label[i] = bg.label;
        result.cloud.d_tau[i] = bg.tau;

        Vec3 d_mu = Vec3::Zero();
        Vec3 d_center = Vec3::Zero();

        // Color: SH coefficients and the view-direction path.
        {
          const Vec3 delta = mu - center;
          const Scalar nd = delta.norm();
          const Vec3 dir = delta / nd;
          Scalar basis[16];
          Vec3 basis_grad[16];
          sh_basis(degree, dir, basis);
          sh_basis_dir_grad(degree, dir, basis_grad);
          Vec3 d_dir = Vec3::Zero();
          for (int k = 0; k < 3; ++k) {
            if (bg.rgb[k] == 0 || pg.rgb_clamped[static_cast<size_t>(k)]) continue;
            for (int b = 0; b < n_sh; ++b) {
              result.cloud.d_sh(k, static_cast<Eigen::Index>(i) * n_sh + b) += bg.rgb[k] * basis[b];
              d_dir += bg.rgb[k] * cloud.sh(k, static_cast<Eigen::Index>(i) * n_sh + b) *
                       basis_grad[b];
            }
          }
          if (!d_dir.isZero()) {
            const Vec3 chained = (d_dir - dir * dir.dot(d_dir)) / nd;
            d_mu += chained;
            d_center -= chained;
          }
        }

        // Screen covariance and orientation.
        const Mat2 gp_mat =
            (Mat2() << bg.p[0], 0.5 * bg.p[1], 0.5 * bg.p[1], bg.p[2]).finished();
        Mat2 g_cov = -pg.inv_cov2d * gp_mat * pg.inv_cov2d;
        if (pg.orient_valid && pg.beta_from_cov && bg.beta != 0) {
          const Scalar ca = pg.cov2d(0, 0), cb = pg.cov2d(0, 1), cc = pg.cov2d(1, 1);
          const Scalar den = (ca - cc) * (ca - cc) + 4 * cb * cb;
          const Scalar ga = -cb / den * bg.beta;
          const Scalar gb = (ca - cc) / den * bg.beta;
          const Scalar gc = cb / den * bg.beta;
          g_cov += (Mat2() << ga, 0.5 * gb, 0.5 * gb, gc).finished();
        }

        const Mat3 g_sigma = m.transpose() * g_cov * m;
        Mat23 g_m = 2.0 * g_cov * m * sigma;

        Vec3 d_axis = Vec3::Zero();
        bool axis_used = false;
        Vec3 axis = Vec3::Zero();
        if (pg.orient_valid && !pg.beta_from_cov && bg.beta != 0) {
          axis_used = true;
          axis = cloud.has_axis_override() ? Vec3(cloud.axis_override.col(i))
                                           : principal_axis(s, q);
          const Vec2 v2 = m * axis;
          const Vec2 dv2 = bg.beta * Vec2(-v2.y(), v2.x()) / v2.squaredNorm();
          g_m += dv2 * axis.transpose();
          d_axis = m.transpose() * dv2;
        }

        // Through Sigma = R S^2 R^T.
        Mat3 g_r3 = 2.0 * g_sigma * r3 * s2.asDiagonal();
        for (int k = 0; k < 3; ++k) {
          const Scalar ds2 = r3.col(k).dot(g_sigma * r3.col(k));
          result.cloud.d_scale(k, i) += 2.0 * s[k] * ds2;
        }
        if (axis_used) {
          if (cloud.has_axis_override())
            result.cloud.d_axis.col(i) += d_axis;
          else
            g_r3.col(argmax_scale(s)) += d_axis;
        }
        const auto dr_dq = rotation_quat_derivatives(q);
        for (int k = 0; k < 4; ++k)
          result.cloud.d_quat(k, i) += (g_r3.array() * dr_dq[static_cast<size_t>(k)].array()).sum();

        // Through M = J W and the projection of the mean.
        const Mat23 g_j = g_m * w_eff.transpose();
        const Mat3 g_w = j.transpose() * g_m;
        Vec3 d_x = j.transpose() * Vec2(bg.mu[0], bg.mu[1]);
        const Scalar iz2 = 1.0 / (z * z), iz3 = iz2 / z;
        d_x.x() += g_j(0, 2) * (-cam.fx * iz2);
        d_x.y() += g_j(1, 2) * (-cam.fy * iz2);
        d_x.z() += g_j(0, 0) * (-cam.fx * iz2) + g_j(1, 1) * (-cam.fy * iz2) +
                   g_j(0, 2) * (2 * cam.fx * x.x() * iz3) + g_j(1, 2) * (2 * cam.fy * x.y() * iz3);

        d_mu += w_eff.transpose() * d_x;
        result.cloud.d_mean.col(i) += d_mu;

        // Camera residual.
        acc.dt += d_x;
        acc.omega += jl.transpose() * ((r_delta * u0).cross(d_x));
        Vec3 w_term = Vec3::Zero();
        for (int k = 0; k < 3; ++k) w_term += Vec3(w_eff.col(k)).cross(Vec3(g_w.col(k)));
        acc.omega += jl.transpose() * w_term;
        if (!d_center.isZero()) {
          acc.dt += -w_eff * d_center;
          acc.omega += jl.transpose() * (cam.res_trans.cross(w_eff * d_center));
        }
      },
      [](CameraAccum& a, const CameraAccum& b) {
        a.omega += b.omega;
        a.dt += b.dt;
      });

  result.d_omega = cam_acc.omega;
  result.d_dt = cam_acc.dt;
  return result;
}

}  // namespace hairsplat
