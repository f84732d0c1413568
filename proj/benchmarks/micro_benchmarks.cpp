#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "physr/physr.hpp"

namespace {

using namespace physr;

const synth::SyntheticCapture& table_capture(int points) {
  static std::map<int, synth::SyntheticCapture> cache;
  auto it = cache.find(points);
  if (it == cache.end()) {
    auto scene = synth::scenes::table(3);
    scene.point_count = static_cast<std::size_t>(points);
    scene.cameras.count = 30;
    it = cache.emplace(points, synth::generate(scene)).first;
  }
  return it->second;
}

void BM_VisibilityMask(benchmark::State& state) {
  const auto& b = table_capture(static_cast<int>(state.range(0))).bundle;
  const double eps = geometry::default_visibility_epsilon(b.cloud.positions);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::visibility_mask(b.cloud.positions, b.views, eps));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(b.views.size()));
}
BENCHMARK(BM_VisibilityMask)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Downsample(benchmark::State& state) {
  const auto& b = table_capture(static_cast<int>(state.range(0))).bundle;
  for (auto _ : state) benchmark::DoNotOptimize(sampling::downsample(b.cloud.positions));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Downsample)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FusionBatch(benchmark::State& state) {
  const auto& b = table_capture(20000).bundle;
  MeanColorProvider provider;
  RunConfig config;
  const auto vis = geometry::visibility_mask(b.cloud.positions, b.views,
                                             geometry::default_visibility_epsilon(b.cloud.positions));
  auto sources = sampling::downsample(b.cloud.positions);
  geometry::NormalOrientation orient;
  for (const auto& v : b.views) orient.camera_centers.push_back(v.pose.center());
  orient.visibility = &vis;
  sources.normals = geometry::estimate_normals(b.cloud.positions, config.normal_k, orient, sources.indices).normals;
  const auto rankings = view_select::rank_views(sources, b.views, vis, config.k_views);
  const auto requests = fusion::plan_patches(sources, rankings, b.views, config.scales);
  for (auto _ : state) {
    const auto emb = fusion::encode_global_batch(requests, b.views, provider);
    benchmark::DoNotOptimize(fusion::fuse(sources.size(), emb, requests));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(requests.size()));
}
BENCHMARK(BM_FusionBatch)->Unit(benchmark::kMillisecond);

void BM_FeatureKnn(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> n(0.0F, 1.0F);
  const auto queries = static_cast<Eigen::Index>(state.range(0));
  RowMatrixf q(queries, 32);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = n(rng);
  densify::SourceAnchors anchors;
  anchors.features.resize(150, 32);
  for (Eigen::Index i = 0; i < anchors.features.size(); ++i) anchors.features.data()[i] = n(rng);
  anchors.probabilities = RowMatrixd::Constant(150, 4, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(densify::dino_knn_interpolate(q, anchors, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FeatureKnn)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
