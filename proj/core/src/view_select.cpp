#include "physr/view_select.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "physr/errors.hpp"
#include "physr/log.hpp"
#include "physr/parallel.hpp"

namespace physr::view_select {
namespace {

constexpr double kUnitTolerance = 1e-4;

Vec3 as_unit(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (std::abs(n - 1.0) <= kUnitTolerance) return v;
  if (!(n > 0.0)) throw PreconditionError(std::string("angle_score: zero-length ") + what);
  log_warning(std::string("angle_score: normalising non-unit ") + what);
  return v / n;
}

bool ranks_before(const ViewScore& a, const ViewScore& b) {
  if (a.s_total != b.s_total) return a.s_total > b.s_total;
  return a.view < b.view;
}

std::optional<ViewScore> score_pair(const sampling::SourcePointSet& sources, std::size_t s, const ViewRecord& view,
                                    const Vec3& center, std::size_t v) {
  const Vec3 cam = view.pose.to_camera(sources.positions[s]);
  if (!(cam.z() > 0.0)) return std::nullopt;
  ViewScore score;
  score.point = static_cast<std::uint32_t>(s);
  score.view = static_cast<std::uint32_t>(v);
  score.z = cam.z();
  score.s_dist = distance_score(cam.z());
  score.s_angle = angle_score((sources.positions[s] - center).normalized(), sources.normals[s]);
  score.s_total = score.s_dist * score.s_angle;
  return score;
}

void check_inputs(const sampling::SourcePointSet& sources, std::span<const ViewRecord> views,
                  const geometry::VisibilityMask& visibility) {
  if (sources.normals.size() != sources.size()) {
    throw PreconditionError("view scoring needs one normal per source point");
  }
  if (visibility.view_count() != views.size()) throw PreconditionError("visibility does not match view count");
}

std::vector<Vec3> camera_centers(std::span<const ViewRecord> views) {
  std::vector<Vec3> centers(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) centers[v] = views[v].pose.center();
  return centers;
}

}  // namespace

double distance_score(double z) {
  if (!(z > 0.0)) throw PreconditionError("distance_score: point must lie in front of the camera (z > 0)");
  return 1.0 / (1.0 + z);
}

double angle_score(const Vec3& view_dir, const Vec3& normal) {
  const Vec3 v = as_unit(view_dir, "view direction");
  const Vec3 n = as_unit(normal, "normal");
  return std::max(0.0, -v.dot(n));
}

std::vector<ViewScore> score_visible_pairs(const sampling::SourcePointSet& sources,
                                           std::span<const ViewRecord> views,
                                           const geometry::VisibilityMask& visibility) {
  check_inputs(sources, views, visibility);
  const auto centers = camera_centers(views);
  std::vector<ViewScore> out;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (!visibility(sources.indices[s], v)) continue;
      if (auto score = score_pair(sources, s, views[v], centers[v], v)) out.push_back(*score);
    }
  }
  return out;
}

std::size_t Rankings::total_pairs() const {
  std::size_t n = 0;
  for (const auto& r : per_point) n += r.size();
  return n;
}

Rankings rank_views(const sampling::SourcePointSet& sources, std::span<const ViewRecord> views,
                    const geometry::VisibilityMask& visibility, int k) {
  if (k < 1) throw PreconditionError("rank_views: k must be >= 1");
  check_inputs(sources, views, visibility);
  const auto centers = camera_centers(views);

  Rankings out;
  out.per_point.resize(sources.size());
  out.no_visible_view.assign(sources.size(), 0);
  parallel_for(sources.size(), [&](std::size_t s) {
    std::vector<ViewScore> scores;
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (!visibility(sources.indices[s], v)) continue;
      if (auto score = score_pair(sources, s, views[v], centers[v], v)) scores.push_back(*score);
    }
    if (scores.empty()) {
      out.no_visible_view[s] = 1;
      return;
    }
    const std::size_t keep = std::min(scores.size(), static_cast<std::size_t>(k));
    std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep), scores.end(),
                      ranks_before);
    scores.resize(keep);
    out.per_point[s] = std::move(scores);
  });
  return out;
}

}  // namespace physr::view_select
