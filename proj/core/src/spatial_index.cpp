#include "physr/spatial_index.hpp"

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <cmath>
#include <iterator>
#include <limits>

namespace physr {
namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using Point = bg::model::point<double, 3, bg::cs::cartesian>;
using Box = bg::model::box<Point>;
using Entry = std::pair<Point, std::uint32_t>;

Point to_point(const Vec3& p) { return {p.x(), p.y(), p.z()}; }

}  // namespace

struct SpatialIndex::Tree {
  bgi::rtree<Entry, bgi::rstar<16>> rtree;
};

SpatialIndex::SpatialIndex(std::span<const Vec3f> points) : points_(points), tree_(std::make_unique<Tree>()) {
  std::vector<Entry> entries(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    entries[i] = {to_point(points[i].cast<double>()), static_cast<std::uint32_t>(i)};
  }
  // Range construction packs the tree; the layout depends only on the input.
  tree_->rtree = bgi::rtree<Entry, bgi::rstar<16>>(entries);
}

SpatialIndex::~SpatialIndex() = default;
SpatialIndex::SpatialIndex(SpatialIndex&&) noexcept = default;
SpatialIndex& SpatialIndex::operator=(SpatialIndex&&) noexcept = default;

std::vector<std::uint32_t> SpatialIndex::nearest(const Vec3& query, std::size_t k) const {
  k = std::min(k, points_.size());
  if (k == 0) return {};
  auto dist2 = [&](std::uint32_t i) { return (points_[i].cast<double>() - query).squaredNorm(); };

  auto rank = [&](const std::vector<Entry>& hits, double limit) {
    std::vector<std::pair<double, std::uint32_t>> ranked;
    ranked.reserve(hits.size());
    for (const auto& h : hits) {
      const double d = dist2(h.second);
      if (d <= limit) ranked.emplace_back(d, h.second);
    }
    std::sort(ranked.begin(), ranked.end());
    return ranked;
  };

  // One extra neighbour shows whether the k-th distance is shared.
  std::vector<Entry> hits;
  hits.reserve(k + 1);
  tree_->rtree.query(bgi::nearest(to_point(query), static_cast<unsigned>(k + 1)), std::back_inserter(hits));
  auto ranked = rank(hits, std::numeric_limits<double>::infinity());
  if (ranked.size() > k && ranked[k].first == ranked[k - 1].first) {
    // The tree breaks ties arbitrarily; re-collect everything within the
    // k-th distance so equal distances resolve by index.
    const double radius2 = ranked[k - 1].first;
    const double r = std::sqrt(radius2) * (1.0 + 1e-9) + 1e-12;
    const Box box(to_point(query - Vec3::Constant(r)), to_point(query + Vec3::Constant(r)));
    hits.clear();
    tree_->rtree.query(bgi::intersects(box), std::back_inserter(hits));
    ranked = rank(hits, radius2);
  }
  ranked.resize(std::min(k, ranked.size()));
  std::vector<std::uint32_t> out(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) out[i] = ranked[i].second;
  return out;
}

}  // namespace physr
