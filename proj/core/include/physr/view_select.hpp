#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "physr/geometry.hpp"
#include "physr/sampling.hpp"

namespace physr::view_select {

struct ViewScore {
  std::uint32_t point = 0;  // index into the source set
  std::uint32_t view = 0;
  double z = 0.0;  // camera-frame depth, metres
  double s_dist = 0.0;
  double s_angle = 0.0;
  double s_total = 0.0;
};

// 1 / (1 + z); z must be positive.
double distance_score(double z);

// max(0, view_dir . (-normal)), view_dir pointing from the camera to the
// point. Inputs more than 1e-4 away from unit length are normalised with a
// warning.
double angle_score(const Vec3& view_dir, const Vec3& normal);

// Scores for every (source point, view) pair visible in `visibility`
// (rows indexed by full-cloud point). Row-major over points.
std::vector<ViewScore> score_visible_pairs(const sampling::SourcePointSet& sources,
                                           std::span<const ViewRecord> views,
                                           const geometry::VisibilityMask& visibility);

struct Rankings {
  std::vector<std::vector<ViewScore>> per_point;  // sorted by s_total desc, view asc
  std::vector<std::uint8_t> no_visible_view;      // 1 = point seen by no view

  std::size_t total_pairs() const;
};

// Keeps the top-k visible views per source point. Sources need normals.
Rankings rank_views(const sampling::SourcePointSet& sources, std::span<const ViewRecord> views,
                    const geometry::VisibilityMask& visibility, int k);

}  // namespace physr::view_select
