#include "physr/densify.hpp"

#include <algorithm>
#include <numeric>

#include "physr/errors.hpp"
#include "physr/log.hpp"
#include "physr/parallel.hpp"
#include "physr/spatial_index.hpp"

namespace physr::densify {
namespace {

constexpr Eigen::Index kQueryBlock = 2048;

RowMatrixd normalized_rows(const RowMatrixf& m) {
  RowMatrixd out = m.cast<double>();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n > 0.0) out.row(i) /= n;
  }
  return out;
}

// Writes the weighted mean of the selected probability rows into `out`.
void blend_rows(const RowMatrixd& probabilities, std::span<const std::uint32_t> neighbours,
                std::span<const double> weights, Eigen::Ref<Eigen::RowVectorXd> out) {
  double total = 0.0;
  for (double w : weights) total += w;
  out.setZero();
  if (total > 0.0) {
    for (std::size_t j = 0; j < neighbours.size(); ++j) out += (weights[j] / total) * probabilities.row(neighbours[j]);
  } else {
    for (auto n : neighbours) out += probabilities.row(n);
    out /= static_cast<double>(neighbours.size());
  }
}

void check_k(int k, std::size_t sources) {
  if (k < 1) throw PreconditionError("knn interpolation: k must be >= 1");
  if (static_cast<std::size_t>(k) > sources) {
    throw PreconditionError("knn interpolation: k = " + std::to_string(k) + " exceeds " + std::to_string(sources) +
                            " source points");
  }
}

}  // namespace

RowMatrixd dino_knn_interpolate(const RowMatrixf& query_features, const SourceAnchors& sources, int k,
                                std::span<const std::uint8_t> query_valid) {
  check_k(k, sources.size());
  if (query_features.cols() != sources.features.cols()) {
    throw PreconditionError("dino_knn_interpolate: query and source feature dimensions differ");
  }
  if (sources.probabilities.rows() != sources.features.rows()) {
    throw PreconditionError("dino_knn_interpolate: source features and probabilities differ in length");
  }
  const auto nq = query_features.rows();
  if (!query_valid.empty()) {
    if (query_valid.size() != static_cast<std::size_t>(nq)) {
      throw PreconditionError("dino_knn_interpolate: validity flags do not match queries");
    }
    std::string missing;
    std::size_t count = 0;
    for (std::size_t i = 0; i < query_valid.size(); ++i) {
      if (query_valid[i]) continue;
      if (count < 20) missing += (count ? ", " : "") + std::to_string(i);
      ++count;
    }
    if (count > 0) {
      if (count > 20) missing += ", ...";
      throw PreconditionError("dino_knn_interpolate: " + std::to_string(count) +
                              " queries lack a geometric feature: " + missing);
    }
  }

  const RowMatrixd src = normalized_rows(sources.features);
  const auto ks = static_cast<std::size_t>(k);
  RowMatrixd out(nq, sources.probabilities.cols());
  const auto blocks = static_cast<std::size_t>((nq + kQueryBlock - 1) / kQueryBlock);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        const Eigen::Index begin = static_cast<Eigen::Index>(b) * kQueryBlock;
        const Eigen::Index rows = std::min(kQueryBlock, nq - begin);
        const RowMatrixd sims = normalized_rows(query_features.middleRows(begin, rows)) * src.transpose();
        std::vector<std::uint32_t> order(sources.size());
        std::vector<double> weights(ks);
        for (Eigen::Index r = 0; r < rows; ++r) {
          std::iota(order.begin(), order.end(), 0U);
          std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::uint32_t a, std::uint32_t c) {
            const double sa = sims(r, a);
            const double sc = sims(r, c);
            return sa > sc || (sa == sc && a < c);
          });
          for (std::size_t j = 0; j < ks; ++j) weights[j] = std::max(0.0, sims(r, order[j]));
          blend_rows(sources.probabilities, {order.data(), ks}, weights, out.row(begin + r));
        }
      },
      1);
  return out;
}

RowMatrixd euclidean_knn_interpolate(std::span<const Vec3f> queries, std::span<const Vec3> source_positions,
                                     const RowMatrixd& source_probabilities, int k) {
  check_k(k, source_positions.size());
  if (source_probabilities.rows() != static_cast<Eigen::Index>(source_positions.size())) {
    throw PreconditionError("euclidean_knn_interpolate: positions and probabilities differ in length");
  }
  const auto ks = static_cast<std::size_t>(k);
  RowMatrixd out(static_cast<Eigen::Index>(queries.size()), source_probabilities.cols());
  parallel_for(queries.size(), [&](std::size_t q) {
    const Vec3 p = queries[q].cast<double>();
    std::vector<double> dist(source_positions.size());
    for (std::size_t s = 0; s < dist.size(); ++s) dist[s] = (source_positions[s] - p).norm();
    std::vector<std::uint32_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0U);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::uint32_t a, std::uint32_t c) {
      return dist[a] < dist[c] || (dist[a] == dist[c] && a < c);
    });
    auto row = out.row(static_cast<Eigen::Index>(q));
    if (dist[order[0]] == 0.0) {
      row = source_probabilities.row(order[0]);
      return;
    }
    std::vector<double> weights(ks);
    for (std::size_t j = 0; j < ks; ++j) weights[j] = 1.0 / dist[order[j]];
    blend_rows(source_probabilities, {order.data(), ks}, weights, row);
  });
  return out;
}

std::vector<std::int32_t> dominant_materials(const RowMatrixd& probabilities) {
  std::vector<std::int32_t> out(static_cast<std::size_t>(probabilities.rows()), 0);
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probabilities.cols(); ++c) {
      if (probabilities(i, c) > probabilities(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(best);
  }
  return out;
}

SourceAnchors make_anchors(const fusion::SemanticPointCloud& cloud, const sampling::SourcePointSet& sources,
                           const grounding::MaterialProbabilities& grounded) {
  if (grounded.size() != sources.size()) throw PreconditionError("make_anchors: grounding does not match sources");
  std::vector<std::size_t> keep;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (!grounded.missing[s] && cloud.has_feature(sources.indices[s])) keep.push_back(s);
  }
  SourceAnchors anchors;
  anchors.features.resize(static_cast<Eigen::Index>(keep.size()), cloud.features.cols());
  anchors.probabilities.resize(static_cast<Eigen::Index>(keep.size()), grounded.weights.cols());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    anchors.features.row(row) = cloud.features.row(sources.indices[keep[j]]);
    anchors.probabilities.row(row) = grounded.weights.row(static_cast<Eigen::Index>(keep[j]));
  }
  return anchors;
}

PropertyField densify_field(const fusion::SemanticPointCloud& cloud, const sampling::SourcePointSet& sources,
                            const grounding::MaterialProbabilities& grounded, const MaterialDictionary& dict,
                            int k) {
  if (grounded.weights.cols() != static_cast<Eigen::Index>(dict.size())) {
    throw PreconditionError("densify_field: grounding does not match the dictionary");
  }
  const SourceAnchors anchors = make_anchors(cloud, sources, grounded);
  if (anchors.size() == 0) {
    throw PreconditionError("densify_field: no source point has both a fused embedding and a geometric feature");
  }
  if (static_cast<std::size_t>(k) > anchors.size()) {
    log_warning("densify: k = " + std::to_string(k) + " reduced to " + std::to_string(anchors.size()) +
                " usable source points");
    k = static_cast<int>(anchors.size());
  }

  PropertyField field;
  field.positions = cloud.positions;
  field.material_names = dict.names();

  RowMatrixf query = cloud.features;
  std::vector<Vec3f> featured;
  std::vector<std::uint32_t> featured_index;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.has_feature(i)) continue;
    featured.push_back(cloud.positions[i]);
    featured_index.push_back(static_cast<std::uint32_t>(i));
  }
  field.borrowed_features = cloud.size() - featured.size();
  if (field.borrowed_features > 0) {
    const SpatialIndex grid(featured);
    parallel_for(cloud.size(), [&](std::size_t i) {
      if (cloud.has_feature(i)) return;
      const auto nn = grid.nearest(cloud.positions[i].cast<double>(), 1);
      query.row(static_cast<Eigen::Index>(i)) = cloud.features.row(featured_index[nn.front()]);
    });
  }

  field.probabilities = dino_knn_interpolate(query, anchors, k);
  field.dominant = dominant_materials(field.probabilities);
  field.properties = grounding::regress_properties(field.probabilities, dict);
  return field;
}

}  // namespace physr::densify
