#include "fipo/io.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace fipo;

namespace {

std::string temp_dir() {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("fipo_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string data_file(const std::string& name) {
  return std::string(FIPO_DATA_DIR) + "/" + name;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST(LoadUniverse, ShippedFileHasSixteenSleevesWithOracleDurations) {
  const auto sleeves = load_universe(data_file("universe.csv"));
  ASSERT_EQ(sleeves.size(), 16u);
  for (const auto& s : sleeves) {
    // durations were left blank in the file: recomputed from (T, c, m, y)
    const auto fd = oracle::fd_duration_convexity(
        [&](double y) { return price_bullet(s.maturity, s.coupon, s.frequency, y); },
        s.yield);
    EXPECT_NEAR(s.dur_cr, fd.first, 1e-6 * fd.first) << s.name;
    if (s.floating)
      EXPECT_EQ(s.dur_ir, 0.0) << s.name;
    else
      EXPECT_NEAR(s.dur_ir, fd.first, 1e-6 * fd.first) << s.name;
  }
  int floaters = 0, hy = 0;
  for (const auto& s : sleeves) {
    floaters += s.floating;
    hy += s.high_yield;
  }
  EXPECT_EQ(floaters, 1);
  EXPECT_EQ(hy, 4);
}

TEST(LoadUniverse, EmptyFileIsAnError) {
  const std::string dir = temp_dir();
  write_text(dir + "/u.csv",
             "name,ticker,maturity,coupon,frequency,rating,yield,spread,dur_ir,dur_cr,"
             "floating,tags,max_weight,stress_spread\n");
  EXPECT_THROW(load_universe(dir + "/u.csv"), std::runtime_error);
}

TEST(LoadUniverse, BoundViolationNamesTheRow) {
  const std::string dir = temp_dir();
  write_text(dir + "/u.csv",
             "name,ticker,maturity,coupon,frequency,rating,yield,spread,dur_ir,dur_cr,"
             "floating,tags,max_weight,stress_spread\n"
             "ok,T1,5,0.03,2,A,0.03,0.005,,,0,,0.5,0.02\n"
             "bad,T2,5,0.03,2,A,0.03,0.005,,,0,,1.2,0.02\n");
  try {
    load_universe(dir + "/u.csv");
    FAIL() << "expected a validation error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(LoadUniverse, RoundTripPreservesValuesExactly) {
  const auto sleeves = load_universe(data_file("universe.csv"));
  const std::string dir = temp_dir();
  save_universe(dir + "/u.csv", sleeves);
  const auto again = load_universe(dir + "/u.csv");
  ASSERT_EQ(again.size(), sleeves.size());
  for (size_t j = 0; j < sleeves.size(); ++j) {
    EXPECT_EQ(again[j].name, sleeves[j].name);
    EXPECT_EQ(again[j].yield, sleeves[j].yield);
    EXPECT_EQ(again[j].spread, sleeves[j].spread);
    EXPECT_EQ(again[j].dur_ir, sleeves[j].dur_ir);
    EXPECT_EQ(again[j].dur_cr, sleeves[j].dur_cr);
    EXPECT_EQ(again[j].max_weight, sleeves[j].max_weight);
    EXPECT_EQ(again[j].stress_spread, sleeves[j].stress_spread);
    EXPECT_EQ(again[j].high_yield, sleeves[j].high_yield);
    EXPECT_EQ(again[j].floating, sleeves[j].floating);
  }
}

TEST(LoadTransitions, ShippedMatrixIsStochasticWithAbsorbingDefault) {
  const auto m = load_transitions(data_file("transitions.csv"));
  EXPECT_EQ(m.size(), 8);
  for (int i = 0; i < m.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < m.size(); ++j) sum += m.at(i, j);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ(m.at(7, 7), 1.0);
  EXPECT_NEAR(m.default_prob(Rating::parse("B")), 0.0520, 1e-12);
}

TEST(LoadTransitions, NonStochasticRowRejected) {
  const std::string dir = temp_dir();
  write_text(dir + "/t.csv", "from,A,D\nA,0.8,0.1\nD,0,1\n");
  EXPECT_THROW(load_transitions(dir + "/t.csv"), std::invalid_argument);
}

TEST(LoadRatingCurves, ShippedCurvesValidateAndInterpolate) {
  const auto c = load_rating_curves(data_file("rating_curves.csv"));
  EXPECT_DOUBLE_EQ(c.recovery.recovery_rate, 0.30);
  EXPECT_NEAR(c.riskfree_rate(5), 0.025, 1e-15);
  EXPECT_NEAR(c.riskfree_rate(7.5), 0.025 + 0.5 * 0.003, 1e-15);
  EXPECT_NEAR(c.spread(Rating::parse("BB"), 5), 0.032, 1e-15);
  // notch rating falls back to its letter curve
  EXPECT_NEAR(c.spread(Rating::parse("BB-"), 5), 0.032, 1e-15);
}

TEST(LoadRatingCurves, CrossingCurvesRejected) {
  const std::string dir = temp_dir();
  write_text(dir + "/c.csv",
             "rating,1,5\nRF,0.02,0.025\nA,0.01,0.012\nBBB,0.008,0.02\n");
  EXPECT_THROW(load_rating_curves(dir + "/c.csv"), std::invalid_argument);
}

TEST(MarketSeries, SaveLoadRoundTripIsExact) {
  const auto universe = load_universe(data_file("universe.csv"));
  const auto curves = load_rating_curves(data_file("rating_curves.csv"));
  SyntheticParams params;
  const auto series = generate_synthetic_history(
      params, universe, curves, {"2020-01-06", "2020-04-06", "2020-07-06"}, 7);
  const std::string dir = temp_dir();
  save_market_series(dir + "/series.csv", series);
  const auto again = load_market_series(dir + "/series.csv");
  ASSERT_EQ(again.dates, series.dates);
  ASSERT_EQ(again.sleeve_names, series.sleeve_names);
  ASSERT_EQ(again.rf_tenors, series.rf_tenors);
  for (size_t d = 0; d < series.snapshots.size(); ++d) {
    EXPECT_EQ(again.snapshots[d].riskfree, series.snapshots[d].riskfree);
    EXPECT_EQ(again.snapshots[d].sleeve_yield, series.snapshots[d].sleeve_yield);
    EXPECT_EQ(again.snapshots[d].sleeve_spread, series.snapshots[d].sleeve_spread);
  }
}

TEST(GenerateSyntheticHistory, DeterministicUnderSeed) {
  const auto universe = load_universe(data_file("universe.csv"));
  const auto curves = load_rating_curves(data_file("rating_curves.csv"));
  SyntheticParams params;
  const std::vector<std::string> dates = {"2020-01-06", "2020-04-06", "2020-07-06"};
  const auto a = generate_synthetic_history(params, universe, curves, dates, 42);
  const auto b = generate_synthetic_history(params, universe, curves, dates, 42);
  const auto c = generate_synthetic_history(params, universe, curves, dates, 43);
  for (size_t d = 0; d < dates.size(); ++d) {
    EXPECT_EQ(a.snapshots[d].sleeve_spread, b.snapshots[d].sleeve_spread);
    EXPECT_EQ(a.snapshots[d].riskfree, b.snapshots[d].riskfree);
  }
  EXPECT_NE(a.snapshots[2].sleeve_spread, c.snapshots[2].sleeve_spread);
}

TEST(GenerateSyntheticHistory, ZeroVolIsConstant) {
  const auto universe = load_universe(data_file("universe.csv"));
  const auto curves = load_rating_curves(data_file("rating_curves.csv"));
  SyntheticParams params;
  params.rates.sigma_y = 1e-300;
  params.rates.sigma_hat = 1e-300;
  const auto s = generate_synthetic_history(params, universe, curves,
                                            {"2020-01-06", "2021-01-06"}, 1);
  for (size_t j = 0; j < universe.size(); ++j) {
    EXPECT_NEAR(s.snapshots[1].sleeve_spread[j], universe[j].spread, 1e-12);
    EXPECT_NEAR(s.snapshots[1].sleeve_yield[j], s.snapshots[0].sleeve_yield[j], 1e-12);
  }
}

TEST(GenerateSyntheticHistory, TenBusinessDayYieldMovesMatchGaussianRow) {
  const auto universe = load_universe(data_file("universe.csv"));
  const auto curves = load_rating_curves(data_file("rating_curves.csv"));
  SyntheticParams params;
  params.rates.kappa = 0.0;
  params.rates.sigma_y = 0.009;
  // consecutive dates exactly 10 business days apart
  std::vector<std::string> dates;
  Date d{2015, 1, 5};
  for (int i = 0; i < 3000; ++i) {
    dates.push_back(d.iso());
    d = d.plus_days(14);
  }
  const auto series = generate_synthetic_history(params, universe, curves, dates, 11);
  std::vector<double> moves;
  for (size_t i = 1; i < series.snapshots.size(); ++i)
    moves.push_back(100.0 *
                    (series.snapshots[i].riskfree[0] - series.snapshots[i - 1].riskfree[0]));
  double abs_sum = 0.0, sq_sum = 0.0;
  for (double m : moves) {
    abs_sum += std::fabs(m);
    sq_sum += m * m;
  }
  const auto expect = table_stats_normal(0.009, 10, 260);
  const double n = static_cast<double>(moves.size());
  const double mean_abs = abs_sum / n;
  const double se_abs = std::sqrt((sq_sum / n - mean_abs * mean_abs) / n);
  EXPECT_NEAR(mean_abs, expect.mean_abs, 4.0 * se_abs);
  EXPECT_NEAR(sq_sum / n, expect.mean_sq, 0.08 * expect.mean_sq);
}

TEST(RunConfigJson, ParsesShippedConfig) {
  const auto cfg = load_config(data_file("config.json"));
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_DOUBLE_EQ(cfg.risk.sigma_y, 0.009);
  EXPECT_DOUBLE_EQ(cfg.risk.alpha[3], 2.0);
  EXPECT_DOUBLE_EQ(cfg.caps.high_yield, 0.60);
  ASSERT_TRUE(cfg.caps.avg_rating.has_value());
  EXPECT_EQ(std::string(cfg.caps.avg_rating->label()), "BB");
  ASSERT_EQ(cfg.scenarios.size(), 6u);
  EXPECT_TRUE(cfg.scenarios[3].steepen.has_value());
  EXPECT_TRUE(cfg.scenarios[5].stress);
  EXPECT_EQ(cfg.grid().size(), 20u);
  ASSERT_TRUE(cfg.risk_limit.has_value());
  EXPECT_DOUBLE_EQ(*cfg.risk_limit, 0.10);
}

TEST(RunConfigJson, HashIsStableAndSensitive) {
  const auto cfg = load_config(data_file("config.json"));
  auto cfg2 = cfg;
  EXPECT_EQ(config_hash(cfg), config_hash(cfg2));
  cfg2.seed = 43;
  EXPECT_NE(config_hash(cfg), config_hash(cfg2));
  auto cfg3 = cfg;
  cfg3.risk.rho = 0.5;
  EXPECT_NE(config_hash(cfg), config_hash(cfg3));
}

TEST(RunConfigJson, BadJsonIsAnError) {
  const std::string dir = temp_dir();
  write_text(dir + "/c.json", "{ not json");
  EXPECT_THROW(load_config(dir + "/c.json"), std::runtime_error);
}
