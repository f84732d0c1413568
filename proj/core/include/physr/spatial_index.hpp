#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "physr/types.hpp"

namespace physr {

// Exact k-nearest-neighbour index over a static point set (bulk-loaded
// R-tree). Results are ordered by (distance, index); the indexed span must
// outlive the index.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const Vec3f> points);
  ~SpatialIndex();
  SpatialIndex(SpatialIndex&&) noexcept;
  SpatialIndex& operator=(SpatialIndex&&) noexcept;

  std::vector<std::uint32_t> nearest(const Vec3& query, std::size_t k) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Tree;
  std::span<const Vec3f> points_;
  std::unique_ptr<Tree> tree_;
};

}  // namespace physr
