#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

namespace physr {
namespace {

using integrate::adaptive_voxel_side;

MaterialDictionary single(double density, double thickness) {
  MaterialDictionary d;
  d.entries.push_back({"ceramic", {{"density", PropertyValue::scalar(density)}}, thickness});
  return d;
}

densify::PropertyField uniform_field(std::vector<Vec3f> positions, std::size_t k = 1) {
  densify::PropertyField f;
  f.positions = std::move(positions);
  f.probabilities = RowMatrixd::Zero(static_cast<Eigen::Index>(f.positions.size()), static_cast<Eigen::Index>(k));
  f.probabilities.col(0).setOnes();
  for (std::size_t m = 0; m < k; ++m) f.material_names.push_back("m" + std::to_string(m));
  return f;
}

std::vector<Vec3f> surface_cloud(const synth::SyntheticScene& scene) {
  auto s = scene;
  s.cameras.count = 1;
  return synth::generate(s).bundle.cloud.positions;
}

TEST(VoxelSide, Examples) {
  EXPECT_DOUBLE_EQ(adaptive_voxel_side(1.0, 1.0, 100), 0.1);
  EXPECT_DOUBLE_EQ(adaptive_voxel_side(2.5, 2.0, 1), 5.0);
  EXPECT_NEAR(adaptive_voxel_side(1.0, 1.0, 200) * std::sqrt(2.0), 0.1, 1e-15);
  EXPECT_THROW(adaptive_voxel_side(0.0, 1.0, 10), PreconditionError);
  EXPECT_THROW(adaptive_voxel_side(1.0, 1.0, 0), PreconditionError);
}

TEST(SurfaceArea, UnitSquareAndSphere) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0F, 1.0F);
  std::vector<Vec3f> square(20000);
  for (auto& p : square) p = Vec3f(u(rng), u(rng), 0.0F);
  // Edge points see fewer neighbours, so a few percent of excess is expected.
  EXPECT_NEAR(integrate::estimate_surface_area(square), 1.0, 0.05);
  std::vector<Vec3f> sphere(20000);
  for (auto& p : sphere) p = test::random_unit(rng).cast<float>();
  EXPECT_NEAR(integrate::estimate_surface_area(sphere) / (4.0 * std::numbers::pi), 1.0, 0.03);
}

TEST(PairwiseSum, MatchesExactSum) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(integrate::pairwise_sum(v), 999.0 * 1000.0 / 2.0);
  EXPECT_EQ(integrate::pairwise_sum({}), 0.0);
}

TEST(Mass, HollowUnitCube) {
  const auto cloud = surface_cloud([] {
    auto s = synth::scenes::unit_box(1000.0, 0.01);
    s.point_count = 10000;
    return s;
  }());
  const auto est = integrate::integrate_mass(uniform_field(cloud), single(1000.0, 0.01), {.lambda = 1.0});
  EXPECT_NEAR(est.mass_kg / 60.0, 1.0, 0.15) << est.mass_kg;
  EXPECT_LT(est.center_of_mass.norm(), 0.05);
  EXPECT_DOUBLE_EQ(est.per_material[0].mass_kg, est.mass_kg);
}

TEST(Mass, Sphere) {
  const double r = 0.4;
  const auto cloud = surface_cloud([&] {
    auto s = synth::scenes::sphere(r, 800.0, 0.02);
    s.point_count = 8000;
    return s;
  }());
  const double truth = 4.0 * std::numbers::pi * r * r * 0.02 * 800.0;
  const auto est = integrate::integrate_mass(uniform_field(cloud), single(800.0, 0.02), {.lambda = 1.0});
  EXPECT_NEAR(est.mass_kg / truth, 1.0, 0.15) << est.mass_kg;
}

TEST(Mass, EmptyFieldIsZero) {
  densify::PropertyField f;
  f.probabilities = RowMatrixd::Zero(0, 1);
  const auto est = integrate::integrate_mass(f, single(1000.0, 0.01));
  EXPECT_EQ(est.mass_kg, 0.0);
  EXPECT_EQ(est.point_count, 0U);
}

TEST(Mass, AdditivityOfDisjointCubes) {
  auto scene = synth::scenes::unit_box(1000.0, 0.01, 3);
  scene.point_count = 6000;
  const auto one = surface_cloud(scene);
  std::vector<Vec3f> two = one;
  for (const auto& p : one) two.push_back(p + Vec3f(4.0F, 0.0F, 0.0F));
  const auto dict = single(1000.0, 0.01);
  const double m1 = integrate::integrate_mass(uniform_field(one), dict).mass_kg;
  const double m2 = integrate::integrate_mass(uniform_field(two), dict).mass_kg;
  EXPECT_NEAR(m2 / (2.0 * m1), 1.0, 0.01);
}

TEST(Mass, DensityLinearityIsExact) {
  auto scene = synth::scenes::table(1);
  scene.point_count = 3000;
  const auto cloud = surface_cloud(scene);
  std::mt19937_64 rng(5);
  densify::PropertyField f = uniform_field(cloud, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < f.probabilities.rows(); ++i) {
    f.probabilities(i, 0) = u(rng);
    f.probabilities(i, 1) = 1.0 - f.probabilities(i, 0);
  }
  MaterialDictionary d;
  d.entries.push_back({"wood", {{"density", {600.0, 750.0}}}, 0.02});
  d.entries.push_back({"metal", {{"density", PropertyValue::scalar(7850.0)}}, 0.003});
  MaterialDictionary d2 = d;
  for (auto& e : d2.entries) {
    e.properties["density"].lo *= 2.0;
    e.properties["density"].hi *= 2.0;
  }
  const auto a = integrate::integrate_mass(f, d);
  const auto b = integrate::integrate_mass(f, d2);
  EXPECT_EQ(b.mass_kg, 2.0 * a.mass_kg);
  EXPECT_EQ(b.mass_range.lo, 2.0 * a.mass_range.lo);
  EXPECT_EQ(b.mass_range.hi, 2.0 * a.mass_range.hi);
  EXPECT_LT(a.mass_range.lo, a.mass_kg);
  EXPECT_GT(a.mass_range.hi, a.mass_kg);
}

TEST(Mass, LambdaAndScaleFactor) {
  auto scene = synth::scenes::unit_box();
  scene.point_count = 2000;
  const auto field = uniform_field(surface_cloud(scene));
  const auto dict = single(1000.0, 0.01);
  const auto base = integrate::integrate_mass(field, dict, {.lambda = 1.0});
  const auto scaled = integrate::integrate_mass(field, dict, {.lambda = 0.6});
  EXPECT_NEAR(scaled.mass_kg, 0.6 * base.mass_kg, 1e-9 * base.mass_kg);
  const auto doubled = integrate::integrate_mass(field, dict, {.lambda = 1.0, .scale_factor = 2.0});
  EXPECT_NEAR(doubled.mass_kg, 4.0 * base.mass_kg, 1e-9 * base.mass_kg);
  EXPECT_THROW(integrate::integrate_mass(field, dict, {.lambda = 0.0}), ConfigError);
}

TEST(Mass, LongestAxisMode) {
  auto scene = synth::scenes::unit_box();
  scene.point_count = 2000;
  const auto field = uniform_field(surface_cloud(scene));
  const auto est = integrate::integrate_mass(
      field, single(1000.0, 0.01),
      {.lambda = 1.0, .length_mode = integrate::CharacteristicLength::kLongestAxis});
  EXPECT_NEAR(est.characteristic_length, 1.0, 1e-3);
  // b^2 = 1 / N, so the estimate is rho * theta = 10 kg regardless of N.
  EXPECT_NEAR(est.mass_kg, 10.0, 0.01);
}

TEST(Mass, MissingDensityIsValidationError) {
  MaterialDictionary d;
  d.entries.push_back({"x", {{"friction", PropertyValue::scalar(0.3)}}, 0.01});
  EXPECT_THROW(integrate::integrate_mass(uniform_field({Vec3f::Zero(), Vec3f::Ones()}), d), ValidationError);
}

}  // namespace
}  // namespace physr
