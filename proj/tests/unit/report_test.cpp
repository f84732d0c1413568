#include <gtest/gtest.h>

#include <fstream>

#include "json.hpp"
#include "support.hpp"

namespace physr {
namespace {

PropertyReport table_report() {
  auto scene = synth::scenes::table(5);
  scene.cameras.count = 8;
  scene.point_count = 2000;
  scene.materials[0].density = {600.0, 750.0};
  MeanColorProvider provider;
  return run_pipeline(synth::generate(scene).bundle, {}, provider);
}

TEST(Report, FieldPlyColumns) {
  test::TempDir dir;
  const auto r = table_report();
  report::write_field_ply(dir.path() / "f.ply", r.field);
  const auto cols = io::read_vertex_table_ply(dir.path() / "f.ply");
  std::vector<std::string> names;
  for (const auto& c : cols) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"x", "y", "z", "material", "density", "density_min", "density_max"}));
  ASSERT_EQ(cols[0].size(), r.field.size());
  const auto& material = std::get<std::vector<std::int32_t>>(cols[3].data);
  EXPECT_EQ(material, r.field.dominant);
  const auto& x = std::get<std::vector<float>>(cols[0].data);
  EXPECT_EQ(x[10], r.field.positions[10].x());
  const auto& lo = std::get<std::vector<float>>(cols[5].data);
  const auto& hi = std::get<std::vector<float>>(cols[6].data);
  for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_LE(lo[i], hi[i]);
}

TEST(Report, JsonFields) {
  test::TempDir dir;
  const auto r = table_report();
  report::write_run_outputs(dir.path() / "run", r);
  std::ifstream in(dir.path() / "run" / report::kReportName);
  const auto j = nlohmann::json::parse(in);
  EXPECT_DOUBLE_EQ(j.at("mass_kg").at("value").get<double>(), r.estimate.mass_kg);
  EXPECT_LT(j.at("mass_kg").at("min").get<double>(), j.at("mass_kg").at("max").get<double>());
  EXPECT_EQ(j.at("per_material").size(), 2U);
  EXPECT_EQ(j.at("stats").at("patch_requests").get<std::size_t>(), r.stats.patch_requests);
  EXPECT_TRUE(j.at("timings").contains("ingest_s"));
  EXPECT_TRUE(j.contains("ground_truth_mass_kg"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / report::kFieldName));
}

}  // namespace
}  // namespace physr
