#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "physr/types.hpp"

namespace physr::sampling {

struct SamplingConfig {
  int n_target = 150;
  int min_points_per_voxel = 1;
  // Fraction of points farthest from the coordinate-wise median that is
  // ignored when sizing the bounding box.
  double outlier_fraction = 0.005;
};

struct VoxelSize {
  double size = 0.0;
  bool fallback = false;  // volume was degenerate; size came from the diagonal
};

// Cube root of bbox_volume / n_target. A zero or non-finite volume falls
// back to diagonal / cbrt(n_target) and sets the flag.
VoxelSize adaptive_voxel_size(double bbox_volume, int n_target, double diagonal = 0.0);

AxisAlignedBox robust_bounding_box(std::span<const Vec3f> cloud, double outlier_fraction);

// Sparse anchor points chosen from the full cloud. Everything is indexed in
// parallel with `indices`.
struct SourcePointSet {
  std::vector<std::uint32_t> indices;  // into the full cloud, strictly increasing
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;  // filled by the normal-estimation step
  double voxel_size = 0.0;
  bool volume_fallback = false;
  // Number of times the voxel was widened to respect |S| <= n_target.
  int widen_steps = 0;

  std::size_t size() const { return indices.size(); }
};

// One representative per occupied voxel: the original point nearest that
// voxel's centroid (lowest index on ties).
SourcePointSet downsample(std::span<const Vec3f> cloud, const SamplingConfig& config = {});

// Voxel downsampling at an explicit voxel size, anchored at `origin`.
std::vector<std::uint32_t> voxel_representatives(std::span<const Vec3f> cloud, const Vec3& origin,
                                                 double voxel_size, int min_points_per_voxel = 1);

}  // namespace physr::sampling
