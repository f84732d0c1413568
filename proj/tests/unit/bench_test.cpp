#include <gtest/gtest.h>

#include "support.hpp"

namespace physr {
namespace {

TEST(Summarize, MedianAndNearestRankP95) {
  const auto one = bench::summarize({0.7});
  EXPECT_EQ(one.median, 0.7);
  EXPECT_EQ(one.p95, 0.7);
  const auto even = bench::summarize({4.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(even.median, 2.5);
  EXPECT_EQ(even.p95, 4.0);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  EXPECT_EQ(bench::summarize(hundred).p95, 95.0);
  EXPECT_THROW(bench::summarize({}), PreconditionError);
}

TEST(Bench, SingleBundleSingleRepeat) {
  auto scene = synth::scenes::unit_box();
  scene.cameras.count = 6;
  scene.point_count = 1500;
  const std::vector<CaptureBundle> bundles{synth::generate(scene).bundle};
  MeanColorProvider provider;
  bench::BenchConfig config;
  config.repeats = 1;
  const auto r = bench::run_bench(bundles, config, provider);
  for (const char* stage : {"ingest", "fusion", "inference", "total", "fusion/patch_embedding"}) {
    ASSERT_TRUE(r.stages.contains(stage)) << stage;
    EXPECT_EQ(r.stages.at(stage).median, r.stages.at(stage).p95) << stage;
    EXPECT_EQ(r.stages.at(stage).samples, 1U);
  }
  EXPECT_FALSE(r.has_naive);
  ASSERT_EQ(r.bundles.size(), 1U);
  EXPECT_GT(r.bundles[0].optimized_patches, 0U);
}

TEST(Bench, NaiveComparisonAndRepeats) {
  auto scene = synth::scenes::table(2);
  scene.cameras.count = 12;
  scene.point_count = 3000;
  const std::vector<CaptureBundle> bundles{synth::generate(scene).bundle};
  MeanColorProvider provider;
  bench::BenchConfig config;
  config.repeats = 3;
  config.naive = true;
  const auto r = bench::run_bench(bundles, config, provider);
  EXPECT_TRUE(r.has_naive);
  EXPECT_EQ(r.stages.at("fusion").samples, 3U);
  EXPECT_DOUBLE_EQ(r.patch_ratio, static_cast<double>(r.naive_patches) / r.optimized_patches);
  EXPECT_GT(r.patch_ratio, 5.0);
  EXPECT_GT(r.wall_time_ratio, 0.0);
  const std::string json = report::bench_json(r);
  EXPECT_NE(json.find("\"patch_ratio\""), std::string::npos);
  EXPECT_NE(json.find("\"p95_s\""), std::string::npos);
}

TEST(Bench, DirectoryInputsReloadEachRepeat) {
  test::TempDir dir;
  auto scene = synth::scenes::unit_box();
  scene.cameras.count = 4;
  scene.point_count = 800;
  save_bundle(synth::generate(scene).bundle, dir.path() / "b");
  const std::vector<std::filesystem::path> dirs{dir.path() / "b"};
  MeanColorProvider provider;
  bench::BenchConfig config;
  config.repeats = 2;
  const auto r = bench::run_bench(dirs, config, provider);
  EXPECT_EQ(r.stages.at("ingest/load").samples, 2U);
  config.repeats = 0;
  EXPECT_THROW(bench::run_bench(dirs, config, provider), ConfigError);
}

}  // namespace
}  // namespace physr
