#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "support.hpp"

namespace physr {
namespace {

using metrics::MassPair;

TEST(Metrics, PerfectPredictions) {
  const std::vector<MassPair> pairs{{1.0, 1.0}, {5.5, 5.5}, {0.2, 0.2}};
  const auto e = metrics::evaluate(pairs);
  EXPECT_EQ(e.ade, 0.0);
  EXPECT_EQ(e.alde, 0.0);
  EXPECT_EQ(e.ape, 0.0);
  EXPECT_EQ(e.mnre, 1.0);
  EXPECT_EQ(e.count, 3U);
}

TEST(Metrics, DoubledPredictions) {
  const std::vector<MassPair> pairs{{2.0, 1.0}, {8.0, 4.0}, {0.5, 0.25}};
  const auto e = metrics::evaluate(pairs);
  EXPECT_DOUBLE_EQ(e.alde, std::log(2.0));
  EXPECT_EQ(e.ape, 1.0);
  EXPECT_EQ(e.mnre, 0.5);
}

TEST(Metrics, SymmetryDifferences) {
  const std::vector<MassPair> a{{3.0, 1.5}, {1.0, 4.0}};
  const std::vector<MassPair> b{{1.5, 3.0}, {4.0, 1.0}};
  const auto ea = metrics::evaluate(a);
  const auto eb = metrics::evaluate(b);
  EXPECT_DOUBLE_EQ(ea.mnre, eb.mnre);
  EXPECT_DOUBLE_EQ(ea.alde, eb.alde);
  EXPECT_NE(ea.ape, eb.ape);
}

TEST(Metrics, HandComputedFixture) {
  std::ifstream in(test::data_dir() / "mass_pairs.json");
  const auto doc = nlohmann::json::parse(in);
  std::vector<MassPair> pairs;
  for (const auto& p : doc.at("pairs")) pairs.push_back({p.at("predicted"), p.at("truth")});
  const auto e = metrics::evaluate(pairs);
  const auto& x = doc.at("expected");
  EXPECT_NEAR(e.ade, x.at("ade").get<double>(), 1e-12);
  EXPECT_NEAR(e.alde, x.at("alde").get<double>(), 1e-12);
  EXPECT_NEAR(e.ape, x.at("ape").get<double>(), 1e-12);
  EXPECT_NEAR(e.mnre, x.at("mnre").get<double>(), 1e-12);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(metrics::evaluate({}), PreconditionError);
  const std::vector<MassPair> zero{{0.0, 1.0}};
  EXPECT_THROW(metrics::evaluate(zero), ValidationError);
  const std::vector<MassPair> neg{{1.0, -1.0}};
  EXPECT_THROW(metrics::evaluate(neg), ValidationError);
}

TEST(Metrics, CsvHasHeaderRowsAndMean) {
  const std::vector<metrics::EvalRow> rows{{"a", {2.0, 1.0}}, {"b", {1.0, 1.0}}};
  const std::string csv = metrics::eval_rows_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scene_id,predicted_kg,truth_kg,ade,alde,ape,mnre");
  EXPECT_NE(csv.find("\na,2,1,1,"), std::string::npos);
  EXPECT_NE(csv.find("\nmean,,,0.5,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

}  // namespace
}  // namespace physr
