#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"

namespace physr {
namespace {

std::vector<std::uint32_t> brute_nearest(std::span<const Vec3f> pts, const Vec3& q, std::size_t k) {
  std::vector<std::uint32_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0U);
  auto dist = [&](std::uint32_t i) { return (pts[i].cast<double>() - q).squaredNorm(); };
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist(a) < dist(b); });
  order.resize(std::min(k, pts.size()));
  return order;
}

TEST(SpatialIndex, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(-1.0F, 1.0F);
  std::vector<Vec3f> pts;
  for (int i = 0; i < 2000; ++i) pts.emplace_back(u(rng), u(rng), 0.1F * u(rng));
  const SpatialIndex grid(pts);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 q(2.0 * u(rng), 2.0 * u(rng), u(rng));
    for (std::size_t k : {1U, 7U, 40U}) EXPECT_EQ(grid.nearest(q, k), brute_nearest(pts, q, k));
  }
}

TEST(SpatialIndex, TiesResolveByIndex) {
  std::vector<Vec3f> pts(5, Vec3f(1.0F, 1.0F, 1.0F));
  const SpatialIndex grid(pts);
  EXPECT_EQ(grid.nearest(Vec3::Zero(), 3), (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(grid.nearest(Vec3::Zero(), 9).size(), 5U);
}

}  // namespace
}  // namespace physr
