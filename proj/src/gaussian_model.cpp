#include "hairsplat/model/gaussian_model.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "hairsplat/core/parallel.hpp"

namespace hairsplat {

GaussianCloud GaussianModel::activate() const {
  GaussianCloud c;
  c.sh_degree = sh_degree;
  c.mean = mean;
  c.scale = log_scale.array().exp();
  c.quat = quat_raw;
  for (int i = 0; i < count(); ++i) {
    const Scalar n = c.quat.col(i).norm();
    require_state(n > 0, "activate: zero quaternion");
    c.quat.col(i) /= n;
  }
  c.opacity = opacity_logit.unaryExpr([](Scalar x) { return sigmoid(x); });
  c.label = label_logit.unaryExpr([](Scalar x) { return sigmoid(x); });
  c.tau = log_tau.array().exp();
  c.sh = sh;
  return c;
}

GradientBuffers GaussianModel::backward(const CloudGrads& g) const {
  GradientBuffers out;
  out.d_mean = g.d_mean;
  out.d_log_scale = g.d_scale.cwiseProduct(log_scale.array().exp().matrix());
  out.d_quat_raw = Mat4X::Zero(4, count());
  for (int i = 0; i < count(); ++i) {
    const Vec4 q = quat_raw.col(i);
    out.d_quat_raw.col(i) = quat_normalize_jacobian(q).transpose() * g.d_quat.col(i);
  }
  out.d_opacity_logit =
      g.d_opacity.cwiseProduct(opacity_logit.unaryExpr([](Scalar x) {
        const Scalar s = sigmoid(x);
        return s * (1 - s);
      }));
  out.d_label_logit = g.d_label.cwiseProduct(label_logit.unaryExpr([](Scalar x) {
    const Scalar s = sigmoid(x);
    return s * (1 - s);
  }));
  out.d_log_tau = g.d_tau.cwiseProduct(log_tau.array().exp().matrix());
  out.d_sh = g.d_sh;
  return out;
}

GaussianModel GaussianModel::init_from_points(const Mat3X& points, const Mat3X& colors,
                                              int sh_degree) {
  const int n = static_cast<int>(points.cols());
  require_input(n >= 1, "init_from_points: empty point set");
  GaussianModel m;
  m.sh_degree = sh_degree;
  m.mean = points;
  m.log_scale = Mat3X::Zero(3, n);

  // Isotropic initial scale: mean distance to the 3 nearest neighbors.
  VecX knn_dist(n);
  parallel_for(n, [&](int i) {
    Scalar best[3] = {std::numeric_limits<Scalar>::max(), std::numeric_limits<Scalar>::max(),
                      std::numeric_limits<Scalar>::max()};
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Scalar d2 = (points.col(j) - points.col(i)).squaredNorm();
      if (d2 < best[2]) {
        best[2] = d2;
        if (best[2] < best[1]) std::swap(best[1], best[2]);
        if (best[1] < best[0]) std::swap(best[0], best[1]);
      }
    }
    Scalar sum = 0;
    int cnt = 0;
    for (Scalar b : best)
      if (b < std::numeric_limits<Scalar>::max()) {
        sum += std::sqrt(b);
        ++cnt;
      }
    knn_dist[i] = cnt > 0 ? sum / cnt : 1e-3;
  });
  for (int i = 0; i < n; ++i) {
    const Scalar s = std::max(knn_dist[i], Scalar(1e-7));
    m.log_scale.col(i).setConstant(std::log(s));
  }

  m.quat_raw = Mat4X::Zero(4, n);
  m.quat_raw.row(0).setOnes();
  m.opacity_logit = VecX::Constant(n, logit(0.1));
  m.label_logit = VecX::Zero(n);  // sigmoid(0) = 0.5
  m.log_tau = VecX::Zero(n);
  m.sh = MatX::Zero(3, static_cast<Eigen::Index>(n) * m.n_sh());
  for (int i = 0; i < n; ++i) {
    Vec3 c = colors.cols() == n ? Vec3(colors.col(i)) : Vec3(0.5, 0.5, 0.5);
    m.sh.col(static_cast<Eigen::Index>(i) * m.n_sh()) = (c.array() - 0.5).matrix() / 0.28209479177387814;
  }
  m.reset_grad_stats();
  return m;
}

void GaussianModel::accumulate_grad_stats(const CloudGrads&, const std::vector<bool>& visible,
                                          const Mat2X& screen_grads) {
  if (grad_accum.size() != count()) reset_grad_stats();
  for (int i = 0; i < count(); ++i) {
    if (!visible[static_cast<size_t>(i)]) continue;
    grad_accum[i] += screen_grads.col(i).norm();
    grad_count[i] += 1;
  }
}

void GaussianModel::reset_grad_stats() {
  grad_accum = VecX::Zero(count());
  grad_count = VecX::Zero(count());
}

void GaussianModel::keep(const std::vector<int>& indices) {
  const int m = static_cast<int>(indices.size());
  GaussianModel out;
  out.sh_degree = sh_degree;
  out.mean = Mat3X(3, m);
  out.log_scale = Mat3X(3, m);
  out.quat_raw = Mat4X(4, m);
  out.opacity_logit = VecX(m);
  out.label_logit = VecX(m);
  out.log_tau = VecX(m);
  out.sh = MatX(3, static_cast<Eigen::Index>(m) * n_sh());
  for (int k = 0; k < m; ++k) {
    const int i = indices[static_cast<size_t>(k)];
    out.mean.col(k) = mean.col(i);
    out.log_scale.col(k) = log_scale.col(i);
    out.quat_raw.col(k) = quat_raw.col(i);
    out.opacity_logit[k] = opacity_logit[i];
    out.label_logit[k] = label_logit[i];
    out.log_tau[k] = log_tau[i];
    out.sh.middleCols(static_cast<Eigen::Index>(k) * n_sh(), n_sh()) =
        sh.middleCols(static_cast<Eigen::Index>(i) * n_sh(), n_sh());
  }
  mean = out.mean;
  log_scale = out.log_scale;
  quat_raw = out.quat_raw;
  opacity_logit = out.opacity_logit;
  label_logit = out.label_logit;
  log_tau = out.log_tau;
  sh = out.sh;
  reset_grad_stats();
}

void GaussianModel::append(const GaussianModel& extra) {
  const int n = count(), m = extra.count();
  mean.conservativeResize(3, n + m);
  mean.rightCols(m) = extra.mean;
  log_scale.conservativeResize(3, n + m);
  log_scale.rightCols(m) = extra.log_scale;
  quat_raw.conservativeResize(4, n + m);
  quat_raw.rightCols(m) = extra.quat_raw;
  opacity_logit.conservativeResize(n + m);
  opacity_logit.tail(m) = extra.opacity_logit;
  label_logit.conservativeResize(n + m);
  label_logit.tail(m) = extra.label_logit;
  log_tau.conservativeResize(n + m);
  log_tau.tail(m) = extra.log_tau;
  sh.conservativeResize(3, static_cast<Eigen::Index>(n + m) * n_sh());
  sh.rightCols(static_cast<Eigen::Index>(m) * n_sh()) = extra.sh;
}

DensifyStats GaussianModel::densify_and_prune(const DensifyConfig& cfg, Scalar scene_extent,
                                              Rng& rng) {
  DensifyStats stats;
  const int n = count();
  if (n == 0) return stats;
  if (grad_accum.size() != n) reset_grad_stats();

  // Candidates over the gradient threshold, strongest first, children
  // inheriting label/confidence from the parent.
  struct Cand {
    int index;
    Scalar grad;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < n; ++i) {
    if (grad_count[i] < 1) continue;
    const Scalar g = grad_accum[i] / grad_count[i];
    if (g > cfg.grad_threshold) cands.push_back({i, g});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.grad > b.grad; });

  const Scalar size_threshold = cfg.size_threshold_frac * scene_extent;
  GaussianModel children;
  children.sh_degree = sh_degree;
  children.mean = Mat3X(3, 0);
  children.log_scale = Mat3X(3, 0);
  children.quat_raw = Mat4X(4, 0);
  children.opacity_logit = VecX(0);
  children.label_logit = VecX(0);
  children.log_tau = VecX(0);
  children.sh = MatX(3, 0);
  std::vector<int> split_parents;

  int budget = cfg.max_count - n;
  for (const Cand& c : cands) {
    if (budget <= 0) break;
    const int i = c.index;
    const Vec3 s = log_scale.col(i).array().exp();
    GaussianModel child;
    child.sh_degree = sh_degree;
    if (s.maxCoeff() <= size_threshold) {
      // Clone in place.
      child.mean = mean.col(i);
      child.log_scale = log_scale.col(i);
      child.quat_raw = quat_raw.col(i);
      child.opacity_logit = opacity_logit.segment(i, 1);
      child.label_logit = label_logit.segment(i, 1);
      child.log_tau = log_tau.segment(i, 1);
      child.sh = sh.middleCols(static_cast<Eigen::Index>(i) * n_sh(), n_sh());
      children.append(child);
      ++stats.cloned;
      budget -= 1;
    } else {
      if (budget < 2) continue;
      // Split: two children sampled from the parent density, scales shrunk.
      const Quat q(quat_raw(0, i), quat_raw(1, i), quat_raw(2, i), quat_raw(3, i));
      const Mat3 r = quat_to_rot(q);
      child.mean = Mat3X(3, 2);
      child.log_scale = Mat3X(3, 2);
      child.quat_raw = Mat4X(4, 2);
      child.opacity_logit = VecX(2);
      child.label_logit = VecX(2);
      child.log_tau = VecX(2);
      child.sh = MatX(3, 2 * n_sh());
      for (int k = 0; k < 2; ++k) {
        const Vec3 local = rng.normal3().cwiseProduct(s);
        child.mean.col(k) = mean.col(i) + r * local;
        child.log_scale.col(k) =
            log_scale.col(i).array() - std::log(cfg.split_scale_divisor);
        child.quat_raw.col(k) = quat_raw.col(i);
        child.opacity_logit[k] = opacity_logit[i];
        child.label_logit[k] = label_logit[i];
        child.log_tau[k] = log_tau[i];
        child.sh.middleCols(static_cast<Eigen::Index>(k) * n_sh(), n_sh()) =
            sh.middleCols(static_cast<Eigen::Index>(i) * n_sh(), n_sh());
      }
      children.append(child);
      split_parents.push_back(i);
      ++stats.split;
      budget -= 2;
    }
  }

  // Drop split parents and low-opacity primitives, then attach children.
  std::vector<bool> drop(static_cast<size_t>(n), false);
  for (int i : split_parents) drop[static_cast<size_t>(i)] = true;
  for (int i = 0; i < n; ++i) {
    if (!drop[static_cast<size_t>(i)] && sigmoid(opacity_logit[i]) < cfg.min_opacity) {
      drop[static_cast<size_t>(i)] = true;
      ++stats.pruned;
    }
  }
  std::vector<int> kept;
  kept.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    if (!drop[static_cast<size_t>(i)]) kept.push_back(i);
  keep(kept);
  if (children.count() > 0) append(children);
  reset_grad_stats();
  return stats;
}

void GaussianModel::reset_opacity(Scalar value) {
  const Scalar cap = logit(value);
  for (int i = 0; i < count(); ++i) opacity_logit[i] = std::min(opacity_logit[i], cap);
}

namespace {

constexpr std::uint64_t kCheckpointMagic = 0x3154504B43475348ULL;  // "HSGCKPT1"
constexpr std::uint32_t kCheckpointVersion = 1;

void write_block(std::ofstream& f, const Scalar* data, std::size_t n) {
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(Scalar)));
}

void read_block(std::ifstream& f, Scalar* data, std::size_t n) {
  f.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(Scalar)));
}

}  // namespace

void GaussianModel::save_checkpoint(const std::string& path) const {
  static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");
  std::ofstream f(path, std::ios::binary);
  require_state(f.good(), "save_checkpoint: cannot open " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(count());
  const std::uint32_t deg = static_cast<std::uint32_t>(sh_degree);
  f.write(reinterpret_cast<const char*>(&kCheckpointMagic), 8);
  f.write(reinterpret_cast<const char*>(&kCheckpointVersion), 4);
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&deg), 4);
  write_block(f, mean.data(), 3ull * n);
  write_block(f, log_scale.data(), 3ull * n);
  write_block(f, quat_raw.data(), 4ull * n);
  write_block(f, opacity_logit.data(), n);
  write_block(f, label_logit.data(), n);
  write_block(f, log_tau.data(), n);
  write_block(f, sh.data(), 3ull * n * static_cast<std::size_t>(n_sh()));
  require_state(f.good(), "save_checkpoint: write failed for " + path);
}

GaussianModel GaussianModel::load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require_input(f.good(), "load_checkpoint: cannot open " + path);
  std::uint64_t magic = 0;
  std::uint32_t version = 0, n = 0, deg = 0;
  f.read(reinterpret_cast<char*>(&magic), 8);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&deg), 4);
  require_input(magic == kCheckpointMagic, "load_checkpoint: bad magic in " + path);
  require_input(version == kCheckpointVersion, "load_checkpoint: unsupported version");
  GaussianModel m;
  m.sh_degree = static_cast<int>(deg);
  m.mean = Mat3X(3, n);
  m.log_scale = Mat3X(3, n);
  m.quat_raw = Mat4X(4, n);
  m.opacity_logit = VecX(n);
  m.label_logit = VecX(n);
  m.log_tau = VecX(n);
  m.sh = MatX(3, static_cast<Eigen::Index>(n) * m.n_sh());
  read_block(f, m.mean.data(), 3ull * n);
  read_block(f, m.log_scale.data(), 3ull * n);
  read_block(f, m.quat_raw.data(), 4ull * n);
  read_block(f, m.opacity_logit.data(), n);
  read_block(f, m.label_logit.data(), n);
  read_block(f, m.log_tau.data(), n);
  read_block(f, m.sh.data(), 3ull * n * static_cast<std::size_t>(m.n_sh()));
  require_input(f.good(), "load_checkpoint: truncated file " + path);
  m.reset_grad_stats();
  return m;
}

}  // namespace hairsplat
