#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "physr/fusion.hpp"
#include "physr/grounding.hpp"
#include "physr/materials.hpp"

namespace physr::densify {

// Dense per-point material field over the full cloud.
struct PropertyField {
  std::vector<Vec3f> positions;
  std::vector<Vec3> normals;  // unit; empty when not estimated
  std::vector<std::string> material_names;
  RowMatrixd probabilities;  // N x K, rows sum to 1
  std::map<std::string, std::vector<PropertyValue>> properties;
  std::vector<std::int32_t> dominant;  // argmax of each probability row
  // Points whose geometric feature was borrowed from the nearest featured point.
  std::size_t borrowed_features = 0;

  std::size_t size() const { return positions.size(); }
  std::size_t material_count() const { return material_names.size(); }
};

// Anchors for interpolation: geometric features and material probabilities
// of the source points, one row each.
struct SourceAnchors {
  RowMatrixf features;       // S x D
  RowMatrixd probabilities;  // S x K

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

// For each query, the k sources with highest cosine feature similarity
// (ties by lower index); the result is their similarity-weighted mean
// probability row. Negative similarities are clamped to 0; if every clamped
// weight is 0 the unweighted mean is used. Rows flagged in `query_valid`
// as 0 raise PreconditionError listing their indices.
RowMatrixd dino_knn_interpolate(const RowMatrixf& query_features, const SourceAnchors& sources, int k,
                                std::span<const std::uint8_t> query_valid = {});

// Reference path: same weighting, neighbours by Euclidean distance with
// inverse-distance weights (an exact coincidence takes the source's row).
RowMatrixd euclidean_knn_interpolate(std::span<const Vec3f> queries, std::span<const Vec3> source_positions,
                                     const RowMatrixd& source_probabilities, int k);

// argmax per row, lowest index on ties.
std::vector<std::int32_t> dominant_materials(const RowMatrixd& probabilities);

// Builds anchors from the source set: rows of `grounded` flagged missing, and
// sources without a geometric feature, are dropped.
SourceAnchors make_anchors(const fusion::SemanticPointCloud& cloud, const sampling::SourcePointSet& sources,
                           const grounding::MaterialProbabilities& grounded);

// Interpolates probabilities onto every cloud point and regresses every
// shared dictionary property from them. Featureless points first take the
// geometric feature of their nearest featured point in space.
PropertyField densify_field(const fusion::SemanticPointCloud& cloud, const sampling::SourcePointSet& sources,
                            const grounding::MaterialProbabilities& grounded, const MaterialDictionary& dict, int k);

}  // namespace physr::densify
