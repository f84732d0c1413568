#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "support.hpp"

namespace physr {
namespace {

using view_select::angle_score;
using view_select::distance_score;

TEST(Scores, Distance) {
  EXPECT_NEAR(distance_score(1e-12), 1.0, 1e-11);
  EXPECT_DOUBLE_EQ(distance_score(1.0), 0.5);
  EXPECT_DOUBLE_EQ(distance_score(3.0), 0.25);
  EXPECT_GT(distance_score(1.9), distance_score(2.0));
  EXPECT_THROW(distance_score(0.0), PreconditionError);
}

TEST(Scores, Angle) {
  const Vec3 n = Vec3::UnitZ();
  EXPECT_DOUBLE_EQ(angle_score(-n, n), 1.0);
  EXPECT_DOUBLE_EQ(angle_score(Vec3::UnitX(), n), 0.0);
  EXPECT_DOUBLE_EQ(angle_score(n, n), 0.0);
  const double a = std::numbers::pi / 3.0;
  EXPECT_NEAR(angle_score(Vec3(std::sin(a), 0.0, -std::cos(a)), n), 0.5, 1e-12);
  // Non-unit input is normalised rather than rejected.
  EXPECT_DOUBLE_EQ(angle_score(Vec3(0, 0, -3), n), 1.0);
}

sampling::SourcePointSet one_point(const Vec3& p, const Vec3& n) {
  sampling::SourcePointSet s;
  s.indices = {0};
  s.positions = {p};
  s.normals = {n};
  return s;
}

std::vector<ViewRecord> ring_views(int count, double radius) {
  std::vector<ViewRecord> views;
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * std::numbers::pi * i / count;
    const Vec3 eye(radius * std::cos(a), radius * std::sin(a), 1.0 + 0.1 * i);
    views.push_back(test::flat_view(16, 16, 10.0, look_at(eye, Vec3::Zero()), 10.0F));
  }
  return views;
}

TEST(RankViews, SingleVisibleViewIsKeptRegardlessOfScore) {
  auto views = ring_views(4, 3.0);
  // Normal facing away from every camera gives s_total = 0.
  const auto sources = one_point(Vec3::Zero(), Vec3(0, 0, -1));
  geometry::VisibilityMask vis(1, views.size());
  vis.set(0, 2, true);
  const auto r = view_select::rank_views(sources, views, vis, 3);
  ASSERT_EQ(r.per_point[0].size(), 1U);
  EXPECT_EQ(r.per_point[0][0].view, 2U);
  EXPECT_EQ(r.no_visible_view[0], 0);
}

TEST(RankViews, EightVisibleKeepsThree) {
  auto views = ring_views(8, 3.0);
  const auto sources = one_point(Vec3::Zero(), Vec3::UnitZ());
  geometry::VisibilityMask vis(1, views.size());
  for (std::size_t v = 0; v < 8; ++v) vis.set(0, v, true);
  const auto r = view_select::rank_views(sources, views, vis, 3);
  EXPECT_EQ(r.per_point[0].size(), 3U);
  EXPECT_EQ(r.total_pairs(), 3U);
}

TEST(RankViews, NoVisibleView) {
  auto views = ring_views(3, 3.0);
  const auto sources = one_point(Vec3::Zero(), Vec3::UnitZ());
  const auto r = view_select::rank_views(sources, views, geometry::VisibilityMask(1, 3), 3);
  EXPECT_TRUE(r.per_point[0].empty());
  EXPECT_EQ(r.no_visible_view[0], 1);
}

TEST(RankViews, MatchesExhaustiveScoreSort) {
  auto scene = synth::scenes::table(2);
  scene.cameras.count = 12;
  scene.point_count = 2000;
  const auto bundle = synth::generate(scene).bundle;
  const auto& cloud = bundle.cloud.positions;
  auto sources = sampling::downsample(cloud);
  const auto vis = geometry::visibility_mask(cloud, bundle.views, geometry::default_visibility_epsilon(cloud));
  geometry::NormalOrientation orient;
  for (const auto& v : bundle.views) orient.camera_centers.push_back(v.pose.center());
  orient.visibility = &vis;
  sources.normals = geometry::estimate_normals(cloud, 16, orient, sources.indices).normals;

  const int k = 3;
  const auto r = view_select::rank_views(sources, bundle.views, vis, k);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    // Oracle: recompute every score from scratch and sort the whole list.
    std::vector<std::pair<double, std::uint32_t>> all;
    for (std::uint32_t v = 0; v < bundle.views.size(); ++v) {
      if (!vis(sources.indices[s], v)) continue;
      const auto& pose = bundle.views[v].pose;
      const double z = pose.to_camera(sources.positions[s]).z();
      const Vec3 dir = (sources.positions[s] - pose.center()).normalized();
      const double total = (1.0 / (1.0 + z)) * std::max(0.0, -dir.dot(sources.normals[s]));
      all.emplace_back(-total, v);
    }
    std::sort(all.begin(), all.end());
    const std::size_t keep = std::min<std::size_t>(all.size(), k);
    ASSERT_EQ(r.per_point[s].size(), keep);
    for (std::size_t j = 0; j < keep; ++j) {
      EXPECT_EQ(r.per_point[s][j].view, all[j].second);
      EXPECT_NEAR(r.per_point[s][j].s_total, -all[j].first, 1e-12);
    }
  }
  EXPECT_EQ(view_select::score_visible_pairs(sources, bundle.views, vis).size() >= r.total_pairs(), true);
}

TEST(RankViews, RequiresNormals) {
  auto views = ring_views(2, 3.0);
  auto sources = one_point(Vec3::Zero(), Vec3::UnitZ());
  sources.normals.clear();
  EXPECT_THROW(view_select::rank_views(sources, views, geometry::VisibilityMask(1, 2), 3), PreconditionError);
  EXPECT_THROW(view_select::rank_views(one_point(Vec3::Zero(), Vec3::UnitZ()), views, geometry::VisibilityMask(1, 2), 0),
               PreconditionError);
}

}  // namespace
}  // namespace physr
