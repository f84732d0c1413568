#include "physr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "physr/errors.hpp"

namespace physr::sampling {
namespace {

struct Cell {
  std::int64_t x, y, z;
  auto operator<=>(const Cell&) const = default;
};

Cell cell_of(const Vec3f& p, const Vec3& origin, double size) {
  const Vec3 rel = (p.cast<double>() - origin) / size;
  return {static_cast<std::int64_t>(std::floor(rel.x())), static_cast<std::int64_t>(std::floor(rel.y())),
          static_cast<std::int64_t>(std::floor(rel.z()))};
}

}  // namespace

VoxelSize adaptive_voxel_size(double bbox_volume, int n_target, double diagonal) {
  if (n_target < 1) throw PreconditionError("adaptive_voxel_size: n_target must be >= 1");
  if (std::isfinite(bbox_volume) && bbox_volume > 0.0) {
    return {std::cbrt(bbox_volume / n_target), false};
  }
  const double d = diagonal > 0.0 && std::isfinite(diagonal) ? diagonal : 1.0;
  return {d / std::cbrt(static_cast<double>(n_target)), true};
}

AxisAlignedBox robust_bounding_box(std::span<const Vec3f> cloud, double outlier_fraction) {
  const std::size_t n = cloud.size();
  const auto drop = static_cast<std::size_t>(std::floor(outlier_fraction * static_cast<double>(n)));
  if (n == 0 || drop == 0 || drop >= n) return bounding_box(cloud);

  Vec3 median;
  std::vector<float> coord(n);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < n; ++i) coord[i] = cloud[i][a];
    std::nth_element(coord.begin(), coord.begin() + static_cast<std::ptrdiff_t>(n / 2), coord.end());
    median[a] = coord[n / 2];
  }
  std::vector<std::pair<double, std::uint32_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = {(cloud[i].cast<double>() - median).squaredNorm(), static_cast<std::uint32_t>(i)};
  }
  const auto keep = static_cast<std::ptrdiff_t>(n - drop);
  std::nth_element(dist.begin(), dist.begin() + keep, dist.end());
  AxisAlignedBox box;
  box.min = box.max = cloud[dist.front().second].cast<double>();
  for (std::ptrdiff_t i = 0; i < keep; ++i) {
    const Vec3 p = cloud[dist[static_cast<std::size_t>(i)].second].cast<double>();
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

std::vector<std::uint32_t> voxel_representatives(std::span<const Vec3f> cloud, const Vec3& origin,
                                                 double voxel_size, int min_points_per_voxel) {
  std::vector<std::pair<Cell, std::uint32_t>> keyed(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    keyed[i] = {cell_of(cloud[i], origin, voxel_size), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());

  std::vector<std::uint32_t> reps;
  for (std::size_t begin = 0; begin < keyed.size();) {
    std::size_t end = begin;
    Vec3 centroid = Vec3::Zero();
    while (end < keyed.size() && keyed[end].first == keyed[begin].first) {
      centroid += cloud[keyed[end].second].cast<double>();
      ++end;
    }
    const auto count = static_cast<int>(end - begin);
    if (count >= min_points_per_voxel) {
      centroid /= static_cast<double>(count);
      // Indices inside a cell are ascending, so strict < keeps the lowest on ties.
      std::uint32_t best = keyed[begin].second;
      double best_d = (cloud[best].cast<double>() - centroid).squaredNorm();
      for (std::size_t j = begin + 1; j < end; ++j) {
        const double d = (cloud[keyed[j].second].cast<double>() - centroid).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = keyed[j].second;
        }
      }
      reps.push_back(best);
    }
    begin = end;
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

SourcePointSet downsample(std::span<const Vec3f> cloud, const SamplingConfig& config) {
  if (cloud.empty()) throw PreconditionError("downsample: empty cloud");
  if (config.n_target < 1) throw PreconditionError("downsample: n_target must be >= 1");
  if (config.min_points_per_voxel < 1) throw PreconditionError("downsample: min_points_per_voxel must be >= 1");

  const AxisAlignedBox box = robust_bounding_box(cloud, config.outlier_fraction);
  const VoxelSize voxel = adaptive_voxel_size(box.volume(), config.n_target, box.diagonal());

  SourcePointSet out;
  out.voxel_size = voxel.size;
  out.volume_fallback = voxel.fallback;
  const auto cap = static_cast<std::size_t>(config.n_target);
  out.indices = voxel_representatives(cloud, box.min, out.voxel_size, config.min_points_per_voxel);
  // Surface clouds occupy partial boundary voxels and can overshoot; widen
  // until the target holds. The 2% floor guarantees progress.
  while (out.indices.size() > cap) {
    out.voxel_size *= std::max(1.02, std::cbrt(static_cast<double>(out.indices.size()) / config.n_target));
    out.indices = voxel_representatives(cloud, box.min, out.voxel_size, config.min_points_per_voxel);
    ++out.widen_steps;
  }
  if (out.indices.empty()) {
    // Only possible when min_points_per_voxel rejects every voxel.
    out.indices = voxel_representatives(cloud, box.min, out.voxel_size, 1);
  }
  out.positions.reserve(out.indices.size());
  for (auto i : out.indices) out.positions.push_back(cloud[i].cast<double>());
  return out;
}

}  // namespace physr::sampling
