#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "physr/geometry.hpp"
#include "physr/sampling.hpp"
#include "physr/view_select.hpp"

namespace physr {

using RowMatrixf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class PatchEmbeddingProvider;

namespace fusion {

// Full cloud with per-point geometric features averaged over visible views.
struct SemanticPointCloud {
  std::vector<Vec3f> positions;
  RowMatrixf features;                   // N x D; zero rows where no view sees the point
  std::vector<std::uint16_t> visible_views;  // per point

  std::size_t size() const { return positions.size(); }
  bool has_feature(std::size_t i) const { return visible_views[i] > 0; }
  std::size_t featureless_count() const;
};

// Mean of bilinearly sampled view features over the views where each point
// is visible. Taps across occlusion edges (depth off by more than
// depth_tolerance) are dropped; a negative tolerance means 1% of the cloud's
// bounding-box diagonal.
SemanticPointCloud aggregate_geometric_features(const PointCloud& cloud, std::span<const ViewRecord> views,
                                                const geometry::VisibilityMask& visibility,
                                                double depth_tolerance = -1.0);

struct PatchWindow {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  bool operator==(const PatchWindow&) const = default;
};

struct PatchRequest {
  std::uint32_t point = 0;  // source-set index (or cloud index on the dense path)
  std::uint32_t view = 0;
  int scale = 0;  // nominal side length, pixels
  Eigen::Vector2i center = Eigen::Vector2i::Zero();
  PatchWindow window;
  double rank_weight = 0.0;  // s_total of the view for this point
};

// side x side window around `center`, shifted (never padded) to lie inside
// a width x height image; sides longer than the image shrink to fit.
PatchWindow clamp_window(const Eigen::Vector2i& center, int side, int width, int height);

// One request per (point, retained view, scale), grouped by point, then
// view rank, then scale in the given order.
std::vector<PatchRequest> plan_patches(const sampling::SourcePointSet& sources,
                                       const view_select::Rankings& rankings, std::span<const ViewRecord> views,
                                       std::span<const int> scales);

// Reference workload without sampling or view filtering: every cloud point
// in every view that sees it, at a single scale.
std::vector<PatchRequest> plan_dense_patches(std::span<const Vec3f> points, std::span<const ViewRecord> views,
                                             const geometry::VisibilityMask& visibility, int scale);

struct BatchStats {
  std::size_t provider_calls = 0;
  std::size_t patches = 0;
};

// Embeds all requests through the provider in chunks of at most max_batch,
// preserving request order. Provider failures surface as ProviderError
// carrying the failing chunk's request span.
RowMatrixf encode_global_batch(std::span<const PatchRequest> requests, std::span<const ViewRecord> views,
                               PatchEmbeddingProvider& provider, std::size_t max_batch = 1024,
                               BatchStats* stats = nullptr);

struct FusedFeatures {
  RowMatrixf features;                   // point_count x E, unit rows; zero where missing
  std::vector<std::uint16_t> contributions;  // (view, scale) pairs that fed each point
  std::vector<std::uint8_t> missing;         // 1 = no requests for the point

  std::size_t size() const { return missing.size(); }
};

// Per point: mean over scales inside each view, mean over views, then
// normalised to unit length.
FusedFeatures fuse(std::size_t point_count, const RowMatrixf& embeddings, std::span<const PatchRequest> requests);

}  // namespace fusion
}  // namespace physr
