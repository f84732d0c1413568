#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

namespace physr {
namespace {

using grounding::kernel_regress;
using grounding::softmax_weights;

TEST(Similarity, IdenticalAndOrthogonal) {
  RowMatrixf text(2, 3);
  text << 1, 0, 0, 0, 1, 0;
  RowMatrixf f(2, 3);
  f << 0, 1, 0, 0, 0, 1;
  const auto s = grounding::material_similarity(f, text);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(s(1, 1), 0.0);
}

TEST(Similarity, MatchesDotProductOracle) {
  std::mt19937_64 rng(8);
  const auto f = test::random_unit_rows(50, 12, rng);
  const auto t = test::random_unit_rows(6, 12, rng);
  const auto s = grounding::material_similarity(f, t);
  for (int i = 0; i < 50; ++i) {
    for (int k = 0; k < 6; ++k) {
      double dot = 0.0;
      for (int d = 0; d < 12; ++d) dot += static_cast<double>(f(i, d)) * t(k, d);
      EXPECT_NEAR(s(i, k), dot, 1e-6);
      EXPECT_LE(std::abs(s(i, k)), 1.0 + 1e-12);
    }
  }
}

TEST(Softmax, Properties) {
  const std::vector<double> s{0.2, -0.4, 0.9, 0.1};
  const auto w = softmax_weights(s, 0.1);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  EXPECT_GE(w.minCoeff(), 0.0);
  std::vector<double> shifted = s;
  for (double& x : shifted) x += 37.0;
  EXPECT_LT((softmax_weights(shifted, 0.1) - w).cwiseAbs().maxCoeff(), 1e-12);
  // Scaling changes sharpness, never the winner.
  std::vector<double> scaled = s;
  for (double& x : scaled) x *= 5.0;
  Eigen::Index a = 0;
  Eigen::Index b = 0;
  w.maxCoeff(&a);
  softmax_weights(scaled, 0.1).maxCoeff(&b);
  EXPECT_EQ(a, b);
  // No overflow for huge similarities.
  const std::vector<double> huge{1e6, 1e6 - 1.0};
  EXPECT_TRUE(softmax_weights(huge, 1e-3).allFinite());
}

TEST(Softmax, Errors) {
  const std::vector<double> nan{0.1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(softmax_weights(nan, 0.1), ValidationError);
  const std::vector<double> ok{0.1};
  EXPECT_THROW(softmax_weights(ok, 0.0), PreconditionError);
  EXPECT_THROW(softmax_weights({}, 0.1), PreconditionError);
}

TEST(KernelRegress, SingleMaterialIsExact) {
  const std::vector<double> s{-0.37};
  const std::vector<PropertyValue> y{PropertyValue::scalar(7800.0)};
  EXPECT_EQ(kernel_regress(s, y, 0.1), PropertyValue::scalar(7800.0));
  const std::vector<PropertyValue> r{{600.0, 750.0}};
  EXPECT_EQ(kernel_regress(s, r, 0.1), (PropertyValue{600.0, 750.0}));
}

TEST(KernelRegress, EqualSimilaritiesGiveMean) {
  const std::vector<double> s{0.3, 0.3};
  const std::vector<PropertyValue> y{PropertyValue::scalar(1000.0), PropertyValue::scalar(3000.0)};
  EXPECT_DOUBLE_EQ(kernel_regress(s, y, 0.1).mid(), 2000.0);
}

TEST(KernelRegress, LowTemperatureApproachesArgmax) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> val(1.0, 9000.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(5);
    std::vector<PropertyValue> y(5);
    for (int k = 0; k < 5; ++k) {
      s[k] = u(rng);
      y[k] = PropertyValue::scalar(val(rng));
    }
    const auto best = std::max_element(s.begin(), s.end()) - s.begin();
    // Oracle: the hard argmax. A gap below ~0.03 would leave measurable mass on the runner-up at T=0.001.
    std::vector<double> sorted = s;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted[0] - sorted[1] < 0.03) continue;
    EXPECT_NEAR(kernel_regress(s, y, 0.001).mid(), y[best].mid(), 1e-6);
  }
}

TEST(KernelRegress, StaysInsideHullAndRegressesRangesIndependently) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(4);
    std::vector<PropertyValue> y(4);
    for (int k = 0; k < 4; ++k) {
      s[k] = u(rng);
      const double a = val(rng);
      y[k] = {a, a + val(rng)};
    }
    const auto r = kernel_regress(s, y, 0.1);
    const auto [lo_min, lo_max] = std::minmax_element(y.begin(), y.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    const auto [hi_min, hi_max] = std::minmax_element(y.begin(), y.end(), [](auto& a, auto& b) { return a.hi < b.hi; });
    EXPECT_GE(r.lo, lo_min->lo - 1e-9);
    EXPECT_LE(r.lo, lo_max->lo + 1e-9);
    EXPECT_GE(r.hi, hi_min->hi - 1e-9);
    EXPECT_LE(r.hi, hi_max->hi + 1e-9);
  }
}

TEST(KernelRegress, MonotoneInOneSimilarity) {
  std::vector<double> s{0.1, 0.2, 0.3};
  const std::vector<PropertyValue> y{PropertyValue::scalar(10), PropertyValue::scalar(20),
                                     PropertyValue::scalar(30)};
  double prev = kernel_regress(s, y, 0.1).mid();
  for (int step = 0; step < 10; ++step) {
    s[0] += 0.05;
    const double now = kernel_regress(s, y, 0.1).mid();
    EXPECT_LT(std::abs(now - 10.0), std::abs(prev - 10.0));
    prev = now;
  }
}

MaterialDictionary two_materials() {
  MaterialDictionary d;
  d.entries.push_back({"wood", {{"density", {600.0, 750.0}}, {"friction", PropertyValue::scalar(0.4)}}, 0.02});
  d.entries.push_back({"metal", {{"density", PropertyValue::scalar(7850.0)}}, 0.003});
  return d;
}

TEST(Grounding, MissingPointsGetZeroRows) {
  fusion::FusedFeatures fused;
  fused.features = RowMatrixf::Zero(2, 3);
  fused.features(0, 0) = 1.0F;
  fused.missing = {0, 1};
  fused.contributions = {1, 0};
  RowMatrixf text(2, 3);
  text << 1, 0, 0, 0, 1, 0;
  const auto g = grounding::ground_materials(fused, text, 0.1);
  EXPECT_NEAR(g.weights.row(0).sum(), 1.0, 1e-12);
  EXPECT_GT(g.weights(0, 0), g.weights(0, 1));
  EXPECT_EQ(g.weights.row(1).sum(), 0.0);
}

TEST(Grounding, RegressesSharedPropertiesOnly) {
  RowMatrixd w(1, 2);
  w << 0.5, 0.5;
  const auto props = grounding::regress_properties(w, two_materials());
  ASSERT_EQ(props.size(), 1U);
  EXPECT_DOUBLE_EQ(props.at("density")[0].lo, 0.5 * (600.0 + 7850.0));
  EXPECT_DOUBLE_EQ(props.at("density")[0].hi, 0.5 * (750.0 + 7850.0));
  EXPECT_THROW(grounding::property_column(two_materials(), "friction"), ValidationError);
}

TEST(Grounding, TextCacheEmbedsOnce) {
  MeanColorProvider inner;
  CountingProvider counting(inner);
  grounding::TextEmbeddingCache cache;
  const auto dict = two_materials();
  const RowMatrixf first = cache.get(counting, dict);
  const RowMatrixf second = cache.get(counting, dict);
  EXPECT_EQ(counting.text_calls, 1U);
  EXPECT_EQ(first, second);
  auto other = dict;
  other.entries.pop_back();
  cache.get(counting, other);
  EXPECT_EQ(counting.text_calls, 2U);
}

}  // namespace
}  // namespace physr
