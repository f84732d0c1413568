#pragma once

#include <Eigen/Core>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "physr/fusion.hpp"
#include "physr/materials.hpp"

namespace physr {

using RowMatrixd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace grounding {

// Cosine similarity of every feature row against every text row (S x K).
// Rows are normalised first; zero rows give zero similarity.
RowMatrixd material_similarity(const RowMatrixf& features, const RowMatrixf& text_embeddings);

// softmax(similarities / temperature), computed with max subtraction.
// Throws PreconditionError for temperature <= 0 or an empty input, and
// ValidationError when a similarity is NaN.
Eigen::VectorXd softmax_weights(std::span<const double> similarities, double temperature);

// Weighted mean of material values; range endpoints are regressed
// independently.
PropertyValue weighted_property(std::span<const double> weights, std::span<const PropertyValue> values);

// Softmax-weighted kernel regression of one property.
PropertyValue kernel_regress(std::span<const double> similarities, std::span<const PropertyValue> values,
                             double temperature);

// Values of `property` for every dictionary entry, in entry order. Throws
// ValidationError when an entry lacks the property.
std::vector<PropertyValue> property_column(const MaterialDictionary& dict, const std::string& property);

struct MaterialProbabilities {
  RowMatrixd similarities;  // S x K raw cosine similarities
  RowMatrixd weights;       // S x K softmax rows; zero rows where missing
  std::vector<std::uint8_t> missing;

  std::size_t size() const { return missing.size(); }
};

// Grounds fused point features against material text embeddings.
MaterialProbabilities ground_materials(const fusion::FusedFeatures& fused, const RowMatrixf& text_embeddings,
                                       double temperature);

// Per-point property values for every property shared by all entries.
std::map<std::string, std::vector<PropertyValue>> regress_properties(const RowMatrixd& weights,
                                                                     const MaterialDictionary& dict);

// Caches embed_text results per (provider, material-name list).
class TextEmbeddingCache {
 public:
  const RowMatrixf& get(PatchEmbeddingProvider& provider, const MaterialDictionary& dict);

 private:
  std::map<std::pair<std::string, std::vector<std::string>>, RowMatrixf> cache_;
};

}  // namespace grounding
}  // namespace physr
