#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "lnport/stats.hpp"
#include "unit/markets.hpp"

namespace lnport {
namespace {

using testing::expect_error;

// 40-digit reference values.
TEST(NormalCdf, MatchesReference) {
  const std::pair<double, double> ref[] = {
      {-8.0, 6.2209605742717841235e-16}, {-5.0, 2.8665157187919391167e-7},
      {-2.5, 0.006209665325776135167},   {-1.0, 0.15865525393145705141},
      {-0.3, 0.38208857781104736693},    {0.0, 0.5},
      {0.5, 0.69146246127401310364},     {1.96, 0.97500210485177956379},
      {3.0, 0.99865010196836990547},     {6.0, 0.99999999901341235496},
  };
  for (auto [x, p] : ref) {
    EXPECT_NEAR(normal_cdf(x), p, 1e-15 * std::max(p, 1e-3)) << x;
  }
}

TEST(NormalCdf, SymmetryAndTails) {
  for (double x = -8.0; x <= 8.0; x += 0.37) EXPECT_NEAR(normal_cdf(-x), 1.0 - normal_cdf(x), 1e-15);
  EXPECT_EQ(normal_cdf(-INFINITY), 0.0);
  EXPECT_EQ(normal_cdf(INFINITY), 1.0);
}

TEST(NormalQuantile, MatchesReference) {
  const std::pair<double, double> ref[] = {
      {1e-12, -7.0344838253011319326}, {1e-6, -4.7534243088228989573}, {0.001, -3.0902323061678135354},
      {0.025, -1.9599639845400542118}, {0.3, -0.52440051270804081597}, {0.5, 0.0},
      {0.8, 0.8416212335729143638},    {0.975, 1.9599639845400538556}, {0.999999, 4.7534243088170877657},
  };
  for (auto [p, q] : ref) EXPECT_NEAR(normal_quantile(p), q, 1e-14 * std::max(1.0, std::abs(q))) << p;
}

TEST(NormalQuantile, InvertsCdfAndHandlesBoundaries) {
  for (double p = 0.001; p < 1.0; p += 0.0173) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14);
  EXPECT_EQ(normal_quantile(0.0), -INFINITY);
  EXPECT_EQ(normal_quantile(1.0), INFINITY);
  expect_error([] { normal_quantile(1.5); }, ErrorCode::kInvalidArgument);
  expect_error([] { normal_quantile(NAN); }, ErrorCode::kInvalidArgument);
}

TEST(ShapiroWilk, MatchesRecordedFixtures) {
  std::ifstream in(LNPORT_FIXTURE_DIR "/shapiro_wilk.json");
  ASSERT_TRUE(in);
  const auto fixtures = nlohmann::json::parse(in);
  for (const auto& d : fixtures.at("datasets")) {
    SCOPED_TRACE(d.at("name").get<std::string>());
    const auto values = d.at("values").get<std::vector<double>>();
    const TestResult r = shapiro_wilk(values);
    EXPECT_NEAR(r.statistic, d.at("w").get<double>(), 1e-6);
    EXPECT_NEAR(r.p_value, d.at("p").get<double>(), 1e-5);
  }
}

TEST(ShapiroWilk, InvariantUnderAffineMapsAndOrder) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> x(40);
  for (auto& v : x) v = n(rng);
  const TestResult base = shapiro_wilk(x);
  std::vector<double> y = x;
  for (auto& v : y) v = 3.0 * v - 7.0;
  std::reverse(y.begin(), y.end());
  const TestResult moved = shapiro_wilk(y);
  EXPECT_NEAR(moved.statistic, base.statistic, 1e-12);
  EXPECT_NEAR(moved.p_value, base.p_value, 1e-10);
  EXPECT_GT(base.statistic, 0.0);
  EXPECT_LE(base.statistic, 1.0);
}

TEST(ShapiroWilk, RejectsDegenerateInput) {
  expect_error([] { shapiro_wilk(std::vector<double>{1.0, 2.0}); }, ErrorCode::kInvalidArgument);
  expect_error([] { shapiro_wilk(std::vector<double>(10, 4.2)); }, ErrorCode::kInvalidArgument);
  expect_error([] { shapiro_wilk(std::vector<double>{1.0, NAN, 3.0}); }, ErrorCode::kInvalidArgument);
  expect_error([] { shapiro_wilk(std::vector<double>(5001, 0.0)); }, ErrorCode::kInvalidArgument);
}

TEST(ShapiroWilk, DetectsSkewedData) {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(200);
  for (auto& v : x) v = e(rng);
  EXPECT_LT(shapiro_wilk(x).p_value, 1e-6);
}

TEST(Ecdf, RightContinuousStep) {
  const EmpiricalCdf f({3.0, 1.0, 2.0, 2.0});
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(f(1.0), 0.25);
  EXPECT_EQ(f(2.0), 0.75);
  EXPECT_EQ(f(2.5), 0.75);
  EXPECT_EQ(f(3.0), 1.0);
  EXPECT_EQ(f.sorted().front(), 1.0);
}

TEST(Quantile, TypeSeven) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  expect_error([&] { quantile(v, 1.5); }, ErrorCode::kInvalidArgument);
  expect_error([] { quantile(std::vector<double>{}, 0.5); }, ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace lnport
