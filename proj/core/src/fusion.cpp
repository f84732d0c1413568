#include "physr/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "physr/errors.hpp"
#include "physr/parallel.hpp"
#include "physr/providers.hpp"

namespace physr::fusion {

std::size_t SemanticPointCloud::featureless_count() const {
  return static_cast<std::size_t>(std::count(visible_views.begin(), visible_views.end(), std::uint16_t{0}));
}

SemanticPointCloud aggregate_geometric_features(const PointCloud& cloud, std::span<const ViewRecord> views,
                                                const geometry::VisibilityMask& visibility,
                                                double depth_tolerance) {
  if (visibility.point_count() != cloud.size() || visibility.view_count() != views.size()) {
    throw PreconditionError("aggregate_geometric_features: visibility shape does not match inputs");
  }
  const int dim = views.empty() ? 0 : views.front().features.dim;
  SemanticPointCloud out;
  out.positions = cloud.positions;
  out.features = RowMatrixf::Zero(static_cast<Eigen::Index>(cloud.size()), dim);
  out.visible_views.assign(cloud.size(), 0);
  const double tolerance =
      depth_tolerance >= 0.0 ? depth_tolerance : geometry::default_visibility_epsilon(cloud.positions);

  parallel_for(cloud.size(), [&](std::size_t i) {
    std::vector<double> acc(static_cast<std::size_t>(dim), 0.0);
    const Vec3 p = cloud.positions[i].cast<double>();
    int count = 0;
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (!visibility(i, v)) continue;
      const auto proj = geometry::project_point(p, views[v]);
      if (!proj) continue;
      views[v].features.sample_bilinear_gated(proj->pixel.x(), proj->pixel.y(), views[v].depth, proj->depth,
                                              tolerance, 1.0, acc);
      ++count;
    }
    out.visible_views[i] = static_cast<std::uint16_t>(count);
    if (count == 0) return;
    for (int d = 0; d < dim; ++d) {
      out.features(static_cast<Eigen::Index>(i), d) = static_cast<float>(acc[d] / count);
    }
  });
  return out;
}

PatchWindow clamp_window(const Eigen::Vector2i& center, int side, int width, int height) {
  PatchWindow w;
  w.width = std::clamp(side, 1, width);
  w.height = std::clamp(side, 1, height);
  w.x0 = std::clamp(center.x() - w.width / 2, 0, width - w.width);
  w.y0 = std::clamp(center.y() - w.height / 2, 0, height - w.height);
  return w;
}

std::vector<PatchRequest> plan_patches(const sampling::SourcePointSet& sources,
                                       const view_select::Rankings& rankings, std::span<const ViewRecord> views,
                                       std::span<const int> scales) {
  if (rankings.per_point.size() != sources.size()) {
    throw PreconditionError("plan_patches: rankings do not match the source set");
  }
  for (int s : scales) {
    if (s < 1) throw PreconditionError("plan_patches: patch scales must be positive");
  }
  std::vector<std::vector<PatchRequest>> per_point(sources.size());
  parallel_for(sources.size(), [&](std::size_t p) {
    auto& out = per_point[p];
    out.reserve(rankings.per_point[p].size() * scales.size());
    for (const auto& score : rankings.per_point[p]) {
      const ViewRecord& view = views[score.view];
      const auto proj = geometry::project_point(sources.positions[p], view);
      if (!proj) throw PreconditionError("plan_patches: ranked view does not see its point");
      const Eigen::Vector2i center(
          std::clamp(static_cast<int>(std::floor(proj->pixel.x() + 0.5)), 0, view.width() - 1),
          std::clamp(static_cast<int>(std::floor(proj->pixel.y() + 0.5)), 0, view.height() - 1));
      for (int scale : scales) {
        PatchRequest r;
        r.point = static_cast<std::uint32_t>(p);
        r.view = score.view;
        r.scale = scale;
        r.center = center;
        r.window = clamp_window(center, scale, view.width(), view.height());
        r.rank_weight = score.s_total;
        out.push_back(r);
      }
    }
  });
  std::vector<PatchRequest> requests;
  std::size_t total = 0;
  for (const auto& v : per_point) total += v.size();
  requests.reserve(total);
  for (auto& v : per_point) requests.insert(requests.end(), v.begin(), v.end());
  return requests;
}

std::vector<PatchRequest> plan_dense_patches(std::span<const Vec3f> points, std::span<const ViewRecord> views,
                                             const geometry::VisibilityMask& visibility, int scale) {
  std::vector<PatchRequest> requests;
  requests.reserve(visibility.total_visible());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (!visibility(i, v)) continue;
      const auto proj = geometry::project_point(points[i].cast<double>(), views[v]);
      if (!proj) continue;
      const auto px = geometry::nearest_pixel(proj->pixel, views[v].width(), views[v].height());
      if (!px) continue;
      PatchRequest r;
      r.point = static_cast<std::uint32_t>(i);
      r.view = static_cast<std::uint32_t>(v);
      r.scale = scale;
      r.center = *px;
      r.window = clamp_window(*px, scale, views[v].width(), views[v].height());
      requests.push_back(r);
    }
  }
  return requests;
}

RowMatrixf encode_global_batch(std::span<const PatchRequest> requests, std::span<const ViewRecord> views,
                               PatchEmbeddingProvider& provider, std::size_t max_batch, BatchStats* stats) {
  if (max_batch == 0) throw PreconditionError("encode_global_batch: max_batch must be positive");
  const auto dim = static_cast<Eigen::Index>(provider.dimension());
  RowMatrixf out(static_cast<Eigen::Index>(requests.size()), dim);
  std::vector<ImagePatch> batch;
  for (std::size_t begin = 0; begin < requests.size(); begin += max_batch) {
    const std::size_t end = std::min(requests.size(), begin + max_batch);
    batch.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = requests[i];
      if (r.view >= views.size()) throw ProviderError(begin, end, "request references a missing view");
      batch.push_back({&views[r.view].image, r.view, r.window, r.center, r.scale});
    }
    RowMatrixf rows;
    try {
      rows = provider.embed(batch);
    } catch (const ProviderError&) {
      throw;
    } catch (const std::exception& e) {
      throw ProviderError(begin, end, e.what());
    }
    if (rows.rows() != static_cast<Eigen::Index>(batch.size()) || rows.cols() != dim) {
      throw ProviderError(begin, end, "provider returned a wrongly shaped batch");
    }
    out.middleRows(static_cast<Eigen::Index>(begin), rows.rows()) = rows;
    if (stats) {
      ++stats->provider_calls;
      stats->patches += batch.size();
    }
  }
  return out;
}

FusedFeatures fuse(std::size_t point_count, const RowMatrixf& embeddings, std::span<const PatchRequest> requests) {
  if (embeddings.rows() != static_cast<Eigen::Index>(requests.size())) {
    throw PreconditionError("fuse: embeddings are not aligned with requests");
  }
  const auto dim = embeddings.cols();

  // Bucket request rows by point, keeping request order inside each bucket.
  std::vector<std::vector<std::uint32_t>> rows_of(point_count);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].point >= point_count) throw PreconditionError("fuse: request points past the source set");
    rows_of[requests[i].point].push_back(static_cast<std::uint32_t>(i));
  }

  FusedFeatures out;
  out.features = RowMatrixf::Zero(static_cast<Eigen::Index>(point_count), dim);
  out.contributions.assign(point_count, 0);
  out.missing.assign(point_count, 0);

  parallel_for(point_count, [&](std::size_t p) {
    const auto& rows = rows_of[p];
    if (rows.empty()) {
      out.missing[p] = 1;
      return;
    }
    Eigen::VectorXd point_sum = Eigen::VectorXd::Zero(dim);
    std::size_t views_seen = 0;
    // Views appear in first-seen order; each view's scales are averaged first.
    std::vector<std::uint8_t> used(rows.size(), 0);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (used[a]) continue;
      const std::uint32_t view = requests[rows[a]].view;
      Eigen::VectorXd view_sum = Eigen::VectorXd::Zero(dim);
      std::size_t scales = 0;
      for (std::size_t b = a; b < rows.size(); ++b) {
        if (used[b] || requests[rows[b]].view != view) continue;
        used[b] = 1;
        view_sum += embeddings.row(rows[b]).transpose().cast<double>();
        ++scales;
      }
      point_sum += view_sum / static_cast<double>(scales);
      ++views_seen;
    }
    const Eigen::VectorXd mean = point_sum / static_cast<double>(views_seen);
    const double norm = mean.norm();
    if (norm > 0.0) out.features.row(static_cast<Eigen::Index>(p)) = (mean / norm).cast<float>().transpose();
    out.contributions[p] = static_cast<std::uint16_t>(rows.size());
  });
  return out;
}

}  // namespace physr::fusion
