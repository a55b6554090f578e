#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "commhash/bench.hpp"
#include "commhash/fixtures.hpp"
#include "commhash/rng.hpp"

using namespace commhash;
using namespace commhash::bench;

namespace {

// Closed-form simple regression.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  double slope = sxy / sxx;
  return {slope, my - slope * mx, sxy * sxy / (sxx * syy)};
}

const std::string kTable = std::string(COMMHASH_DATA_DIR) + "/table1.csv";

}  // namespace

TEST(LinearFit, ExactLine) {
  std::vector<double> x{4, 8, 16, 32, 64}, y;
  for (double v : x) y.push_back(2 * v + 1);
  auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-9);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(LinearFit, FlatLineHasPerfectFit) {
  std::vector<double> x{1, 2, 3}, y{5, 5, 5};
  auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 0.0, 1e-12);
  EXPECT_NEAR(f.intercept, 5.0, 1e-12);
  EXPECT_EQ(f.r_squared, 1.0);
}

TEST(LinearFit, RejectsDegenerateInput) {
  std::vector<double> same{3, 3, 3}, y{1, 2, 3};
  EXPECT_THROW(linear_fit(same, y), std::invalid_argument);
  std::vector<double> one{1}, y1{1};
  EXPECT_THROW(linear_fit(one, y1), std::invalid_argument);
  std::vector<double> x2{1, 2};
  EXPECT_THROW(linear_fit(x2, y), std::invalid_argument);
}

TEST(LinearFit, MatchesClosedFormOnNoisyData) {
  Rng rng(11);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  const double sigma = 1.0 / std::sqrt(12.0);
  int within = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
      x.push_back(i);
      y.push_back(3.0 * i - 7.0 + noise(rng));
    }
    auto f = linear_fit(x, y);
    auto o = ols(x, y);
    EXPECT_NEAR(f.slope, o.slope, 1e-9);
    EXPECT_NEAR(f.intercept, o.intercept, 1e-9);
    EXPECT_NEAR(f.r_squared, o.r_squared, 1e-9);
    // standard errors for x = 0..39: sxx = 5330, mean 19.5
    double se_slope = sigma / std::sqrt(5330.0);
    double se_icpt = sigma * std::sqrt(1.0 / 40 + 19.5 * 19.5 / 5330.0);
    if (std::abs(f.slope - 3.0) < 3 * se_slope && std::abs(f.intercept + 7.0) < 3 * se_icpt) {
      ++within;
    }
  }
  EXPECT_GE(within, 97);
}

TEST(Table1, FitsMatchClosedForm) {
  auto t = read_table1(kTable);
  ASSERT_EQ(t.n.size(), 13u);
  EXPECT_EQ(t.n.front(), 4);
  EXPECT_EQ(t.n.back(), 16384);
  for (const auto* col : {&t.ec_s, &t.modp_s}) {
    auto f = linear_fit(t.n, *col);
    auto o = ols(t.n, *col);
    EXPECT_NEAR(f.slope, o.slope, 1e-12);
    EXPECT_NEAR(f.intercept, o.intercept, 1e-9);
    EXPECT_NEAR(f.r_squared, o.r_squared, 1e-12);
  }
}

TEST(Table1, RejectsBadFiles) {
  EXPECT_THROW(read_table1("/nonexistent/table1.csv"), std::runtime_error);
  std::string path = testing::TempDir() + "bad_table1.csv";
  std::ofstream(path) << "N,ec_s,modp_s\n4,0.1\n";
  EXPECT_THROW(read_table1(path), std::runtime_error);
}

TEST(Bench, SmallRunProducesOnePointPerSize) {
  auto g = fixtures::toy_curve();
  std::vector<std::size_t> sizes{2, 4};
  auto pts = run_bench(g, sizes, 3, 1);
  ASSERT_EQ(pts.size(), 2u);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i].n, sizes[i]);
    EXPECT_EQ(pts[i].trials, 3u);
    EXPECT_GT(pts[i].mean_s, 0.0);
    EXPECT_GE(pts[i].stddev_s, 0.0);
  }
  auto one = run_bench(g, std::vector<std::size_t>{4}, 1, 1);
  EXPECT_EQ(one[0].stddev_s, 0.0);
}

TEST(Bench, CsvAndJson) {
  std::vector<BenchPoint> pts{{Backend::kEc, 4, 2, 0.5, 0.25}, {Backend::kModp, 8, 2, 1.0, 0.0}};
  std::string csv = to_csv(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "backend,N,trials,mean_s,stddev_s");
  EXPECT_NE(csv.find("\nec,4,2,"), std::string::npos);
  EXPECT_NE(csv.find("\nmodp,8,2,"), std::string::npos);

  auto j = nlohmann::json::parse(to_json(LinearFit{0.5, -1.25, 0.75}));
  EXPECT_DOUBLE_EQ(j["slope"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["intercept"].get<double>(), -1.25);
  EXPECT_DOUBLE_EQ(j["r2"].get<double>(), 0.75);
  EXPECT_EQ(backend_name(Backend::kModp), "modp");
}
