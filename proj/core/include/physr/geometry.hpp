#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "physr/bundle.hpp"
#include "physr/types.hpp"

namespace physr::geometry {

struct Projection {
  Vec2 pixel;    // continuous image coordinates
  double depth;  // camera-frame z, metres
};

// Pinhole projection; std::nullopt when the point is at or behind the
// camera plane (z <= 0).
std::optional<Projection> project_point(const Vec3& world, const Intrinsics& k, const CameraPose& pose);
inline std::optional<Projection> project_point(const Vec3& world, const ViewRecord& view) {
  return project_point(world, view.intrinsics, view.pose);
}

// Inverse of project_point for a known z-depth.
Vec3 unproject(const Vec2& pixel, double depth, const Intrinsics& k, const CameraPose& pose);

// Nearest pixel containing `pixel`, or nullopt when outside the image.
std::optional<Eigen::Vector2i> nearest_pixel(const Vec2& pixel, int width, int height);

// Dense |points| x |views| boolean matrix.
class VisibilityMask {
 public:
  VisibilityMask() = default;
  VisibilityMask(std::size_t points, std::size_t views) : points_(points), views_(views), bits_(points * views, 0) {}

  bool operator()(std::size_t point, std::size_t view) const { return bits_[point * views_ + view] != 0; }
  void set(std::size_t point, std::size_t view, bool value) { bits_[point * views_ + view] = value ? 1 : 0; }

  std::size_t point_count() const { return points_; }
  std::size_t view_count() const { return views_; }
  std::size_t visible_views(std::size_t point) const;
  std::size_t total_visible() const;
  bool operator==(const VisibilityMask&) const = default;

 private:
  std::size_t points_ = 0;
  std::size_t views_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Depth-test visibility: a point is visible in a view when it projects
// inside the image onto a pixel with valid depth d and its own camera depth
// is <= d + epsilon. Depth is sampled at the nearest pixel.
VisibilityMask visibility_mask(std::span<const Vec3f> points, std::span<const ViewRecord> views, double epsilon);

// One percent of the cloud's bounding-box diagonal.
double default_visibility_epsilon(std::span<const Vec3f> points);

struct NormalEstimate {
  std::vector<Vec3> normals;           // unit length
  std::vector<std::uint8_t> degenerate;  // 1 where the neighbourhood had rank < 2
};

struct NormalOrientation {
  std::vector<Vec3> camera_centers;
  // Optional visibility over the full cloud; when a point is visible from
  // some cameras its normal faces those cameras, otherwise it faces the
  // centroid of all cameras.
  const VisibilityMask* visibility = nullptr;
};

// PCA normals from the k nearest cloud points around each query index
// (all points when `queries` is empty). Requires k >= 3 and |cloud| >= k.
NormalEstimate estimate_normals(std::span<const Vec3f> cloud, int k, const NormalOrientation& orientation,
                                std::span<const std::uint32_t> queries = {});

// x -> scale * rotation * x + translation
struct Sim3Transform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return scale * (rotation * x) + translation; }
  Sim3Transform inverse() const;
  Sim3Transform operator*(const Sim3Transform& rhs) const;  // (this ∘ rhs)
};

// Closed-form least-squares similarity mapping src onto dst (Umeyama).
// Throws PreconditionError for < 3 pairs and DegenerateError when src is
// collinear or coincident.
Sim3Transform align_similarity(std::span<const Vec3> src, std::span<const Vec3> dst);

// Similarity mapping the source cameras' centres onto the reference
// cameras' centres, pairs matched by index.
Sim3Transform sim3_align(std::span<const CameraPose> source, std::span<const CameraPose> reference);

// Rewrites points, camera extrinsics and depth maps into the transformed
// frame. Pixels and feature maps are unchanged, so reprojection is preserved.
CaptureBundle apply_scale(const CaptureBundle& bundle, const Sim3Transform& t);

}  // namespace physr::geometry
