#include "physr/grounding.hpp"

#include <cmath>

#include "physr/errors.hpp"
#include "physr/parallel.hpp"
#include "physr/providers.hpp"

namespace physr::grounding {

RowMatrixd material_similarity(const RowMatrixf& features, const RowMatrixf& text_embeddings) {
  if (features.cols() != text_embeddings.cols()) {
    throw PreconditionError("material_similarity: feature and text dimensions differ");
  }
  auto normalized = [](const RowMatrixf& m) {
    RowMatrixd out = m.cast<double>();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double n = out.row(i).norm();
      if (n > 0.0) out.row(i) /= n;
    }
    return out;
  };
  return normalized(features) * normalized(text_embeddings).transpose();
}

Eigen::VectorXd softmax_weights(std::span<const double> similarities, double temperature) {
  if (!(temperature > 0.0)) throw PreconditionError("softmax: temperature must be positive");
  if (similarities.empty()) throw PreconditionError("softmax: need at least one material");
  double peak = -std::numeric_limits<double>::infinity();
  for (double s : similarities) {
    if (std::isnan(s)) throw ValidationError("softmax: NaN similarity");
    peak = std::max(peak, s);
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(similarities.size()));
  double total = 0.0;
  for (std::size_t k = 0; k < similarities.size(); ++k) {
    w[static_cast<Eigen::Index>(k)] = std::exp((similarities[k] - peak) / temperature);
    total += w[static_cast<Eigen::Index>(k)];
  }
  return w / total;
}

PropertyValue weighted_property(std::span<const double> weights, std::span<const PropertyValue> values) {
  if (weights.size() != values.size()) throw PreconditionError("weighted_property: size mismatch");
  PropertyValue out{0.0, 0.0};
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.lo += weights[k] * values[k].lo;
    out.hi += weights[k] * values[k].hi;
  }
  return out;
}

PropertyValue kernel_regress(std::span<const double> similarities, std::span<const PropertyValue> values,
                             double temperature) {
  if (similarities.size() != values.size()) throw PreconditionError("kernel_regress: size mismatch");
  if (values.size() == 1) {
    if (std::isnan(similarities[0])) throw ValidationError("softmax: NaN similarity");
    return values[0];
  }
  const Eigen::VectorXd w = softmax_weights(similarities, temperature);
  return weighted_property({w.data(), static_cast<std::size_t>(w.size())}, values);
}

std::vector<PropertyValue> property_column(const MaterialDictionary& dict, const std::string& property) {
  std::vector<PropertyValue> out;
  out.reserve(dict.size());
  for (const auto& e : dict.entries) {
    const auto it = e.properties.find(property);
    if (it == e.properties.end()) {
      throw ValidationError("material '" + e.name + "' has no value for '" + property + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

MaterialProbabilities ground_materials(const fusion::FusedFeatures& fused, const RowMatrixf& text_embeddings,
                                       double temperature) {
  if (text_embeddings.rows() < 1) throw PreconditionError("ground_materials: no materials");
  MaterialProbabilities out;
  out.similarities = material_similarity(fused.features, text_embeddings);
  out.weights = RowMatrixd::Zero(out.similarities.rows(), out.similarities.cols());
  out.missing = fused.missing;
  const auto k = static_cast<std::size_t>(out.similarities.cols());
  parallel_for(fused.size(), [&](std::size_t s) {
    if (out.missing[s]) return;
    const auto row = static_cast<Eigen::Index>(s);
    const Eigen::VectorXd w = softmax_weights({out.similarities.row(row).data(), k}, temperature);
    out.weights.row(row) = w.transpose();
  });
  return out;
}

std::map<std::string, std::vector<PropertyValue>> regress_properties(const RowMatrixd& weights,
                                                                     const MaterialDictionary& dict) {
  if (weights.cols() != static_cast<Eigen::Index>(dict.size())) {
    throw PreconditionError("regress_properties: weight columns do not match the dictionary");
  }
  std::map<std::string, std::vector<PropertyValue>> out;
  const auto k = static_cast<std::size_t>(weights.cols());
  for (const auto& prop : dict.shared_properties()) {
    const auto column = property_column(dict, prop);
    auto& values = out[prop];
    values.resize(static_cast<std::size_t>(weights.rows()));
    parallel_for(values.size(), [&](std::size_t i) {
      values[i] = weighted_property({weights.row(static_cast<Eigen::Index>(i)).data(), k}, column);
    });
  }
  return out;
}

const RowMatrixf& TextEmbeddingCache::get(PatchEmbeddingProvider& provider, const MaterialDictionary& dict) {
  auto key = std::make_pair(provider.name(), dict.names());
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    RowMatrixf rows = provider.embed_text(key.second);
    if (rows.rows() != static_cast<Eigen::Index>(dict.size())) {
      throw Error("provider returned " + std::to_string(rows.rows()) + " text embeddings for " +
                  std::to_string(dict.size()) + " materials");
    }
    it = cache_.emplace(std::move(key), std::move(rows)).first;
  }
  return it->second;
}

}  // namespace physr::grounding
