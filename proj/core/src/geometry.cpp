#include "physr/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "physr/errors.hpp"
#include "physr/parallel.hpp"
#include "physr/spatial_index.hpp"

namespace physr {

CameraPose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-9) x = z.cross(Vec3::UnitX().cross(z).norm() > 1e-9 ? Vec3::UnitX() : Vec3::UnitY());
  x.normalize();
  const Vec3 y = z.cross(x);
  CameraPose pose;
  pose.rotation.row(0) = x.transpose();
  pose.rotation.row(1) = y.transpose();
  pose.rotation.row(2) = z.transpose();
  pose.translation = -pose.rotation * eye;
  return pose;
}

AxisAlignedBox bounding_box(std::span<const Vec3f> points) {
  AxisAlignedBox box;
  if (points.empty()) return box;
  Vec3f lo = points.front();
  Vec3f hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  box.min = lo.cast<double>();
  box.max = hi.cast<double>();
  return box;
}

namespace {

struct Taps {
  int x[2];
  int y[2];
  double w[2][2];  // [row][col]
};

Taps bilinear_taps(double u, double v, int width, int height, int image_width, int image_height) {
  // Map image pixel centres onto feature cell centres.
  const double fu = std::clamp((u + 0.5) * width / image_width - 0.5, 0.0, static_cast<double>(width - 1));
  const double fv = std::clamp((v + 0.5) * height / image_height - 0.5, 0.0, static_cast<double>(height - 1));
  Taps t;
  t.x[0] = static_cast<int>(std::floor(fu));
  t.y[0] = static_cast<int>(std::floor(fv));
  t.x[1] = std::min(t.x[0] + 1, width - 1);
  t.y[1] = std::min(t.y[0] + 1, height - 1);
  const double ax = fu - t.x[0];
  const double ay = fv - t.y[0];
  t.w[0][0] = (1 - ax) * (1 - ay);
  t.w[0][1] = ax * (1 - ay);
  t.w[1][0] = (1 - ax) * ay;
  t.w[1][1] = ax * ay;
  return t;
}

void accumulate(const FeatureMap& f, const Taps& t, double scale, std::span<double> out) {
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (t.w[r][c] == 0.0) continue;
      const auto cell = f.cell(t.x[c], t.y[r]);
      const double w = t.w[r][c] * scale;
      for (int d = 0; d < f.dim; ++d) out[d] += w * cell[d];
    }
  }
}

}  // namespace

void FeatureMap::sample_bilinear(double u, double v, int image_width, int image_height, double weight,
                                 std::span<double> out) const {
  accumulate(*this, bilinear_taps(u, v, width, height, image_width, image_height), weight, out);
}

void FeatureMap::sample_bilinear_gated(double u, double v, const DepthMap& depth_map, double depth,
                                       double tolerance, double weight, std::span<double> out) const {
  Taps t = bilinear_taps(u, v, width, height, depth_map.width, depth_map.height);
  double gap[2][2];
  double closest = std::numeric_limits<double>::infinity();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double pu = (t.x[c] + 0.5) * depth_map.width / width - 0.5;
      const double pv = (t.y[r] + 0.5) * depth_map.height / height - 0.5;
      const int px = std::clamp(static_cast<int>(std::floor(pu + 0.5)), 0, depth_map.width - 1);
      const int py = std::clamp(static_cast<int>(std::floor(pv + 0.5)), 0, depth_map.height - 1);
      const float d = depth_map.at(px, py);
      gap[r][c] = d > 0.0F ? std::abs(d - depth) : std::numeric_limits<double>::infinity();
      if (t.w[r][c] > 0.0) closest = std::min(closest, gap[r][c]);
    }
  }
  // Silhouette points may match no tap; the nearest surface in depth wins.
  const double limit = std::max(tolerance, closest);
  double kept = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (gap[r][c] > limit) t.w[r][c] = 0.0;
      kept += t.w[r][c];
    }
  }
  if (kept > 0.0) {
    accumulate(*this, t, weight / kept, out);
  } else {
    sample_bilinear(u, v, depth_map.width, depth_map.height, weight, out);
  }
}

namespace geometry {

std::optional<Projection> project_point(const Vec3& world, const Intrinsics& k, const CameraPose& pose) {
  const Vec3 c = pose.to_camera(world);
  if (!(c.z() > 0.0)) return std::nullopt;
  return Projection{{k.fx * c.x() / c.z() + k.cx, k.fy * c.y() / c.z() + k.cy}, c.z()};
}

Vec3 unproject(const Vec2& pixel, double depth, const Intrinsics& k, const CameraPose& pose) {
  const Vec3 cam((pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth, depth);
  return pose.to_world(cam);
}

std::optional<Eigen::Vector2i> nearest_pixel(const Vec2& pixel, int width, int height) {
  const double fx = std::floor(pixel.x() + 0.5);
  const double fy = std::floor(pixel.y() + 0.5);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < width && fy < height)) return std::nullopt;
  return Eigen::Vector2i(static_cast<int>(fx), static_cast<int>(fy));
}

std::size_t VisibilityMask::visible_views(std::size_t point) const {
  std::size_t n = 0;
  for (std::size_t v = 0; v < views_; ++v) n += bits_[point * views_ + v];
  return n;
}

std::size_t VisibilityMask::total_visible() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

VisibilityMask visibility_mask(std::span<const Vec3f> points, std::span<const ViewRecord> views, double epsilon) {
  VisibilityMask mask(points.size(), views.size());
  parallel_for(
      views.size(),
      [&](std::size_t v) {
        const ViewRecord& view = views[v];
        for (std::size_t i = 0; i < points.size(); ++i) {
          const auto proj = project_point(points[i].cast<double>(), view);
          if (!proj) continue;
          const auto px = nearest_pixel(proj->pixel, view.depth.width, view.depth.height);
          if (!px) continue;
          const float stored = view.depth.at(px->x(), px->y());
          if (stored <= 0.0F) continue;
          if (proj->depth <= static_cast<double>(stored) + epsilon) mask.set(i, v, true);
        }
      },
      1);
  return mask;
}

double default_visibility_epsilon(std::span<const Vec3f> points) { return 0.01 * bounding_box(points).diagonal(); }

NormalEstimate estimate_normals(std::span<const Vec3f> cloud, int k, const NormalOrientation& orientation,
                                std::span<const std::uint32_t> queries) {
  if (k < 3) throw PreconditionError("estimate_normals: k must be >= 3");
  if (cloud.size() < static_cast<std::size_t>(k)) {
    throw PreconditionError("estimate_normals: k = " + std::to_string(k) + " exceeds cloud size " +
                            std::to_string(cloud.size()));
  }
  if (orientation.visibility && orientation.visibility->point_count() != cloud.size()) {
    throw PreconditionError("estimate_normals: visibility rows must cover the whole cloud");
  }
  Vec3 camera_centroid = Vec3::Zero();
  for (const auto& c : orientation.camera_centers) camera_centroid += c;
  if (!orientation.camera_centers.empty()) camera_centroid /= static_cast<double>(orientation.camera_centers.size());

  const SpatialIndex grid(cloud);
  const std::size_t n = queries.empty() ? cloud.size() : queries.size();
  NormalEstimate out;
  out.normals.resize(n);
  out.degenerate.assign(n, 0);

  parallel_for(n, [&](std::size_t qi) {
    const std::uint32_t idx = queries.empty() ? static_cast<std::uint32_t>(qi) : queries[qi];
    const Vec3 p = cloud[idx].cast<double>();

    Vec3 facing = Vec3::Zero();
    if (orientation.visibility) {
      for (std::size_t v = 0; v < orientation.camera_centers.size(); ++v) {
        if ((*orientation.visibility)(idx, v)) facing += (orientation.camera_centers[v] - p).normalized();
      }
    }
    if (facing.squaredNorm() == 0.0) facing = camera_centroid - p;
    if (facing.squaredNorm() == 0.0) facing = Vec3::UnitZ();

    const auto nbrs = grid.nearest(p, static_cast<std::size_t>(k));
    Vec3 mean = Vec3::Zero();
    for (auto j : nbrs) mean += cloud[j].cast<double>();
    mean /= static_cast<double>(nbrs.size());
    Mat3 cov = Mat3::Zero();
    for (auto j : nbrs) {
      const Vec3 d = cloud[j].cast<double>() - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 ev = eig.eigenvalues();  // ascending
    Vec3 normal;
    if (!(ev[2] > 0.0) || ev[1] <= 1e-12 * ev[2]) {
      normal = facing.normalized();
      out.degenerate[qi] = 1;
    } else {
      normal = eig.eigenvectors().col(0).normalized();
      if (normal.dot(facing) < 0.0) normal = -normal;
    }
    out.normals[qi] = normal;
  });
  return out;
}

Sim3Transform Sim3Transform::inverse() const {
  Sim3Transform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.transpose();
  inv.translation = -inv.scale * (inv.rotation * translation);
  return inv;
}

Sim3Transform Sim3Transform::operator*(const Sim3Transform& rhs) const {
  Sim3Transform out;
  out.scale = scale * rhs.scale;
  out.rotation = rotation * rhs.rotation;
  out.translation = scale * (rotation * rhs.translation) + translation;
  return out;
}

Sim3Transform align_similarity(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) throw PreconditionError("align_similarity: point sets differ in size");
  if (src.size() < 3) throw PreconditionError("align_similarity: need at least 3 correspondences");
  const double n = static_cast<double>(src.size());
  Vec3 mu_src = Vec3::Zero();
  Vec3 mu_dst = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src /= n;
  mu_dst /= n;

  Mat3 cross = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - mu_src;
    const Vec3 b = dst[i] - mu_dst;
    cross += b * a.transpose();
    spread += a * a.transpose();
    var_src += a.squaredNorm();
  }
  cross /= n;
  var_src /= n;

  const Eigen::JacobiSVD<Mat3> spread_svd(spread);
  const Vec3 sv = spread_svd.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= 1e-12 * sv[0]) {
    throw DegenerateError("align_similarity: source points are collinear or coincident");
  }

  const Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;

  Sim3Transform t;
  t.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  t.scale = (svd.singularValues().asDiagonal() * s).trace() / var_src;
  t.translation = mu_dst - t.scale * (t.rotation * mu_src);
  return t;
}

Sim3Transform sim3_align(std::span<const CameraPose> source, std::span<const CameraPose> reference) {
  if (source.size() != reference.size()) throw PreconditionError("sim3_align: pose lists differ in length");
  if (source.size() < 3) throw PreconditionError("sim3_align: need at least 3 pose pairs");
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  src.reserve(source.size());
  dst.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    src.push_back(source[i].center());
    dst.push_back(reference[i].center());
  }
  return align_similarity(src, dst);
}

CaptureBundle apply_scale(const CaptureBundle& bundle, const Sim3Transform& t) {
  if (!(t.scale > 0.0)) throw PreconditionError("apply_scale: scale must be positive");
  CaptureBundle out = bundle;
  for (auto& p : out.cloud.positions) p = t.apply(p.cast<double>()).cast<float>();
  const float s = static_cast<float>(t.scale);
  const Mat3 rt = t.rotation.transpose();
  for (auto& view : out.views) {
    const Mat3 r = view.pose.rotation;
    view.pose.rotation = r * rt;
    view.pose.translation = t.scale * view.pose.translation - r * (rt * t.translation);
    if (t.scale != 1.0) {
      for (float& d : view.depth.values) d *= s;
    }
  }
  return out;
}

}  // namespace geometry
}  // namespace physr
