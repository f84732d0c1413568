#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"

namespace physr {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

synth::SyntheticScene small_scene() {
  auto scene = synth::scenes::table(4);
  scene.cameras.count = 4;
  scene.cameras.width = 40;
  scene.cameras.height = 30;
  scene.point_count = 300;
  scene.feature_dim = 6;
  return scene;
}

TEST(Bundle, SaveLoadRoundTripIsExact) {
  TempDir dir;
  const auto capture = synth::generate(small_scene());
  save_bundle(capture.bundle, dir.path());
  const auto loaded = load_bundle(dir.path());
  EXPECT_EQ(loaded, capture.bundle);
  EXPECT_TRUE(fs::exists(dir.path() / "views" / "3" / "feat.f32"));
  EXPECT_TRUE(fs::exists(dir.path() / "ref_poses.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "materials.json"));
}

TEST(Bundle, MinimalBundle) {
  TempDir dir;
  CaptureBundle bundle;
  bundle.views.push_back(test::flat_view(8, 6, 10.0, CameraPose{}, 2.0F, 2));
  for (int i = 0; i < 8; ++i) bundle.cloud.positions.emplace_back(0.1F * i, 0.0F, 2.0F);
  save_bundle(bundle, dir.path());
  const auto loaded = load_bundle(dir.path());
  EXPECT_EQ(loaded.views.size(), 1U);
  EXPECT_EQ(loaded, bundle);
}

TEST(Bundle, ZeroViewsRejectedBeforeWrite) {
  TempDir dir;
  CaptureBundle bundle;
  bundle.cloud.positions.assign(3, Vec3f::Zero());
  EXPECT_THROW(save_bundle(bundle, dir.path() / "out"), ValidationError);
  EXPECT_FALSE(fs::exists(dir.path() / "out"));
}

TEST(Bundle, ThirtyViewRoundTrip) {
  TempDir dir;
  auto scene = synth::scenes::occlusion_pair(2);
  scene.cameras.count = 30;
  scene.cameras.width = 32;
  scene.cameras.height = 24;
  scene.point_count = 500;
  scene.feature_noise = 0.05;
  scene.random_frame = true;
  const auto capture = synth::generate(scene);
  save_bundle(capture.bundle, dir.path());
  EXPECT_EQ(load_bundle(dir.path()), capture.bundle);
}

TEST(Bundle, OptionalFilesMayBeAbsent) {
  TempDir dir;
  auto scene = small_scene();
  scene.include_materials = false;
  scene.include_reference_poses = false;
  const auto capture = synth::generate(scene);
  save_bundle(capture.bundle, dir.path());
  const auto loaded = load_bundle(dir.path());
  EXPECT_FALSE(loaded.materials.has_value());
  EXPECT_FALSE(loaded.reference_poses.has_value());
  EXPECT_EQ(loaded, capture.bundle);
}

TEST(Bundle, ViewLimitKeepsEvenlySpacedViews) {
  TempDir dir;
  const auto capture = synth::generate(small_scene());
  save_bundle(capture.bundle, dir.path());
  const auto loaded = load_bundle(dir.path(), {.view_limit = 2});
  ASSERT_EQ(loaded.views.size(), 2U);
  EXPECT_EQ(loaded.views[0], capture.bundle.views[0]);
  EXPECT_EQ(loaded.views[1], capture.bundle.views[2]);
  EXPECT_EQ((*loaded.reference_poses)[1], (*capture.bundle.reference_poses)[2]);
  EXPECT_EQ(evenly_spaced_indices(30, 5), (std::vector<std::size_t>{0, 6, 12, 18, 24}));
  EXPECT_EQ(evenly_spaced_indices(3, 10), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Bundle, MissingFilesAreIoErrors) {
  TempDir dir;
  EXPECT_THROW(load_bundle(dir.path()), IoError);
  save_bundle(synth::generate(small_scene()).bundle, dir.path());
  fs::remove(dir.path() / "views" / "1" / "depth.f32");
  EXPECT_THROW(load_bundle(dir.path()), IoError);
}

TEST(Bundle, ShapeMismatchIsStructural) {
  TempDir dir;
  save_bundle(synth::generate(small_scene()).bundle, dir.path());
  const std::uint32_t dims[2] = {3, 3};
  io::write_tensor(dir.path() / "views" / "0" / "depth.f32", dims, std::vector<float>(9, 1.0F));
  EXPECT_THROW(load_bundle(dir.path()), StructuralError);
}

TEST(Bundle, PointCountMismatchIsStructural) {
  TempDir dir;
  auto bundle = synth::generate(small_scene()).bundle;
  save_bundle(bundle, dir.path());
  bundle.cloud.positions.pop_back();
  bundle.cloud.colors.pop_back();
  io::write_point_cloud_ply(dir.path() / "cloud.ply", bundle.cloud);
  EXPECT_THROW(load_bundle(dir.path()), StructuralError);
}

TEST(Bundle, ValidationRejectsBadContent) {
  const auto good = synth::generate(small_scene()).bundle;
  EXPECT_NO_THROW(validate(good));

  auto bad = good;
  bad.views[1].pose.rotation(0, 0) += 1e-3;
  EXPECT_THROW(validate(bad), ValidationError);

  bad = good;
  bad.views[0].depth.values[5] = -1.0F;
  EXPECT_THROW(validate(bad), ValidationError);

  bad = good;
  bad.views[0].intrinsics.fx = 0.0;
  EXPECT_THROW(validate(bad), ValidationError);

  bad = good;
  bad.cloud.positions[0].x() = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(validate(bad), ValidationError);

  bad = good;
  bad.reference_poses->pop_back();
  EXPECT_THROW(validate(bad), StructuralError);

  bad = good;
  bad.views[1].features = FeatureMap(2, 2, 3);
  EXPECT_THROW(validate(bad), StructuralError);

  bad = good;
  bad.views.clear();
  EXPECT_THROW(validate(bad), ValidationError);
}

TEST(Bundle, RotationCheck) {
  EXPECT_TRUE(is_rotation(Mat3::Identity()));
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  EXPECT_FALSE(is_rotation(reflect));
  EXPECT_FALSE(is_rotation(2.0 * Mat3::Identity()));
}

TEST(Bundle, UnsupportedVersion) {
  TempDir dir;
  save_bundle(synth::generate(small_scene()).bundle, dir.path());
  std::ifstream in(dir.path() / "manifest");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 7");
  std::ofstream(dir.path() / "manifest", std::ios::trunc) << text;
  EXPECT_THROW(load_bundle(dir.path()), StructuralError);
}

}  // namespace
}  // namespace physr
