#include <gtest/gtest.h>

#include "support.hpp"

namespace physr {
namespace {

synth::SyntheticScene small_table() {
  auto scene = synth::scenes::table(1);
  scene.cameras.count = 10;
  scene.point_count = 2500;
  return scene;
}

class ThrowingProvider final : public PatchEmbeddingProvider {
 public:
  std::string name() const override { return "throwing"; }
  std::size_t dimension() const override { return 3; }
  RowMatrixf embed(std::span<const ImagePatch>) override { throw std::runtime_error("encoder offline"); }
  RowMatrixf embed_text(std::span<const std::string>) override { return RowMatrixf::Zero(0, 3); }
};

TEST(Pipeline, MissingDictionaryIsConfigError) {
  auto scene = small_table();
  scene.include_materials = false;
  const auto bundle = synth::generate(scene).bundle;
  MeanColorProvider inner;
  CountingProvider provider(inner);
  EXPECT_THROW(run_pipeline(bundle, {}, provider), ConfigError);
  EXPECT_EQ(provider.embed_calls, 0U);
  EXPECT_EQ(provider.text_calls, 0U);
}

TEST(Pipeline, InvalidConfigIsRejected) {
  const auto bundle = synth::generate(small_table()).bundle;
  MeanColorProvider provider;
  RunConfig c;
  c.k_views = 0;
  EXPECT_THROW(run_pipeline(bundle, c, provider), ConfigError);
  c = {};
  c.scales = {};
  EXPECT_THROW(run_pipeline(bundle, c, provider), ConfigError);
  c = {};
  c.temperature = 0.0;
  EXPECT_THROW(run_pipeline(bundle, c, provider), ConfigError);
}

TEST(Pipeline, DeterministicAcrossRuns) {
  const auto bundle = synth::generate(small_table()).bundle;
  MeanColorProvider provider;
  const auto a = run_pipeline(bundle, {}, provider);
  const auto b = run_pipeline(bundle, {}, provider);
  EXPECT_EQ(a.estimate.mass_kg, b.estimate.mass_kg);
  EXPECT_EQ(a.field.probabilities, b.field.probabilities);
  EXPECT_EQ(a.field.dominant, b.field.dominant);
  EXPECT_EQ(a.stats.patch_requests, b.stats.patch_requests);
}

TEST(Pipeline, PatchBudgetStructure) {
  const auto bundle = synth::generate(small_table()).bundle;
  MeanColorProvider inner;
  CountingProvider provider(inner);
  RunConfig c;
  const auto r = run_pipeline(bundle, c, provider);
  EXPECT_LE(r.stats.source_points, 150U);
  // Sum over sources of min(k, visible views) times the scale count.
  const auto& cloud = bundle.cloud.positions;
  const auto vis = geometry::visibility_mask(cloud, bundle.views, r.stats.visibility_epsilon);
  const auto sources = sampling::downsample(cloud);
  std::size_t expected = 0;
  for (auto i : sources.indices) {
    std::size_t seen = 0;
    for (std::size_t v = 0; v < bundle.views.size(); ++v) seen += vis(i, v) ? 1 : 0;
    expected += std::min<std::size_t>(3, seen) * 3;
  }
  EXPECT_EQ(sources.size(), r.stats.source_points);
  EXPECT_EQ(r.stats.patch_requests, expected);
  EXPECT_EQ(provider.embedded_patches, r.stats.patch_requests);
  EXPECT_EQ(r.stats.provider_calls, (r.stats.patch_requests + 1023) / 1024);
}

TEST(Pipeline, StageTimesSumToEndToEnd) {
  auto scene = small_table();
  scene.point_count = 20000;
  const auto bundle = synth::generate(scene).bundle;
  MeanColorProvider provider;
  const auto r = run_pipeline(bundle, {}, provider);
  const auto& t = r.timings;
  EXPECT_GT(t.ingest, 0.0);
  EXPECT_GT(t.fusion, 0.0);
  EXPECT_GT(t.inference, 0.0);
  EXPECT_NEAR(t.total() / t.end_to_end, 1.0, 0.05);
  double detail = 0.0;
  for (const auto& d : t.detail) detail += d.seconds;
  EXPECT_NEAR(detail, t.total(), 1e-12 + 1e-9 * t.total());
}

TEST(Pipeline, ProviderFailureNamesTheStage) {
  const auto bundle = synth::generate(small_table()).bundle;
  ThrowingProvider provider;
  try {
    run_pipeline(bundle, {}, provider);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "fusion");
    EXPECT_NE(std::string(e.what()).find("patch_embedding"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("encoder offline"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, GroundsTableMaterials) {
  auto scene = small_table();
  scene.cameras.width = 192;
  scene.cameras.height = 144;
  const auto capture = synth::generate(scene);
  MeanColorProvider provider;
  const auto r = run_pipeline(capture.bundle, {}, provider);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < r.field.size(); ++i) correct += r.field.dominant[i] == capture.truth.point_material[i];
  EXPECT_GT(static_cast<double>(correct) / r.field.size(), 0.8);
  EXPECT_NEAR(r.estimate.mass_kg / (0.6 * capture.truth.mass_kg), 1.0, 0.35);
}

TEST(Pipeline, MetricScaleRestoresMass) {
  auto scene = synth::scenes::unit_box();
  scene.cameras.count = 10;
  scene.point_count = 4000;
  scene.true_scale = 2.0;
  scene.random_frame = true;
  const auto bundle = synth::generate(scene).bundle;
  MeanColorProvider provider;
  RunConfig c;
  c.lambda = 1.0;
  const auto with = run_pipeline(bundle, c, provider);
  EXPECT_TRUE(with.stats.metric_scale_applied);
  EXPECT_NEAR(with.stats.applied_scale, 2.0, 1e-6);
  EXPECT_NEAR(with.estimate.mass_kg / 60.0, 1.0, 0.15);
  c.metric_scale = false;
  const auto without = run_pipeline(bundle, c, provider);
  EXPECT_FALSE(without.stats.metric_scale_applied);
  // Areas shrink by the square of the frame scale.
  EXPECT_NEAR(without.estimate.mass_kg * 4.0 / with.estimate.mass_kg, 1.0, 0.05);
}

TEST(Pipeline, DirectoryRunMatchesInMemoryRun) {
  test::TempDir dir;
  const auto capture = synth::generate(small_table());
  save_bundle(capture.bundle, dir.path() / "b");
  save_materials(dir.path() / "m.json", *capture.bundle.materials);
  MeanColorProvider provider;
  const auto mem = run_pipeline(capture.bundle, {}, provider);
  const auto disk = run_pipeline(dir.path() / "b", {}, provider, dir.path() / "m.json");
  EXPECT_EQ(mem.estimate.mass_kg, disk.estimate.mass_kg);
  EXPECT_EQ(disk.timings.detail.front().name, "load");
  EXPECT_THROW(run_pipeline(dir.path() / "b", {}, provider, dir.path() / "none.json"), ConfigError);
  EXPECT_THROW(run_pipeline(dir.path() / "nothing", {}, provider), StageError);
}

TEST(Pipeline, ViewLimitSelectsEvenlySpacedViews) {
  const auto bundle = synth::generate(small_table()).bundle;
  const auto sub = select_views(bundle, 5);
  ASSERT_EQ(sub.views.size(), 5U);
  EXPECT_EQ(sub.views[1], bundle.views[2]);
  EXPECT_EQ((*sub.reference_poses)[4], (*bundle.reference_poses)[8]);
  MeanColorProvider provider;
  RunConfig c;
  c.view_limit = 5;
  EXPECT_EQ(run_pipeline(bundle, c, provider).stats.views, 5U);
}

TEST(Pipeline, NaivePathEmbedsEveryVisiblePair) {
  auto scene = small_table();
  scene.point_count = 1500;
  const auto bundle = synth::generate(scene).bundle;
  MeanColorProvider provider;
  const auto naive = naive_dense_fusion(bundle, {}, provider);
  const auto r = run_pipeline(bundle, {}, provider);
  EXPECT_EQ(naive.patches, r.stats.visible_pairs);
  EXPECT_GT(naive.patches, 5 * r.stats.patch_requests);
  EXPECT_EQ(naive.features.size(), bundle.cloud.size());
}

}  // namespace
}  // namespace physr
