#include "fipo/frontier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fipo/backtest.hpp"

using namespace fipo;

namespace {

// small credit book: floating sleeves so the rate measure stays quiet unless
// wanted, heterogeneous spreads so several constraints bind in turn
Sleeve credit_sleeve(const std::string& name, const std::string& rating, double spread,
                     double max_weight, double z_star, bool floating = true) {
  Sleeve s;
  s.name = name;
  s.maturity = 5;
  s.rating = Rating::parse(rating);
  s.spread = spread;
  s.yield = 0.02 + spread;
  s.coupon = s.yield;
  s.frequency = 2;
  const auto dc = duration_convexity(s.maturity, s.coupon, 2, s.yield);
  s.dur_cr = dc.duration;
  s.floating = floating;
  s.dur_ir = floating ? 0.0 : dc.duration;
  s.max_weight = max_weight;
  s.stress_spread = z_star;
  s.high_yield = !s.rating.is_investment_grade();
  return s;
}

std::vector<Sleeve> toy_universe() {
  return {credit_sleeve("ig", "A", 0.012, 0.8, 0.05),
          credit_sleeve("xover", "BB", 0.030, 0.5, 0.10),
          credit_sleeve("hy", "B", 0.055, 0.3, 0.15)};
}

std::vector<double> toy_er() { return {0.008, 0.022, 0.040}; }

ConstraintCaps loose_caps() {
  ConstraintCaps caps;
  caps.avg_rating.reset();
  caps.high_yield = 1.0;
  return caps;
}

}  // namespace

TEST(SweepFrontier, ZeroLimitPassesThroughOrigin) {
  const auto universe = toy_universe();
  RiskConfig cfg;
  const auto pt = solve_at_risk_limit(universe, toy_er(),
                                      build_constraints(universe, loose_caps()), cfg, 0.0);
  EXPECT_NEAR(pt.er, 0.0, 1e-12);
}

TEST(SweepFrontier, SaturatesAtUnconstrainedOptimum) {
  const auto universe = toy_universe();
  RiskConfig cfg;
  const auto cs = build_constraints(universe, loose_caps());
  const auto unconstrained = solve(base_program(universe, toy_er(), cs));
  ASSERT_EQ(unconstrained.status, LpStatus::Optimal);
  for (double big : {5.0, 8.0}) {
    const auto pt = solve_at_risk_limit(universe, toy_er(), cs, cfg, big);
    EXPECT_NEAR(pt.er, unconstrained.objective, 1e-9);
  }
}

TEST(SweepFrontier, EachGridPointMatchesIndependentSolve) {
  const auto universe = toy_universe();
  RiskConfig cfg;
  const auto cs = build_constraints(universe, loose_caps());
  const auto grid = make_risk_grid(0.01, 0.30, 10);
  const auto points = sweep_frontier(universe, toy_er(), cs, cfg, grid);
  ASSERT_EQ(points.size(), grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto lone = solve_at_risk_limit(universe, toy_er(), cs, cfg, grid[i]);
    EXPECT_DOUBLE_EQ(points[i].er, lone.er);
    EXPECT_EQ(points[i].binding, lone.binding);
  }
}

TEST(SweepFrontier, MonotoneAndConcaveOnToyBook) {
  const auto universe = toy_universe();
  RiskConfig cfg;
  const auto cs = build_constraints(universe, loose_caps());
  const auto grid = make_risk_grid(0.005, 0.40, 16);
  const auto points = sweep_frontier(universe, toy_er(), cs, cfg, grid);
  for (size_t i = 1; i < points.size(); ++i)
    EXPECT_GE(points[i].er, points[i - 1].er - 1e-9);
  for (size_t i = 1; i + 1 < points.size(); ++i) {
    const auto &a = points[i - 1], &b = points[i], &c = points[i + 1];
    const double chord = a.er + (c.er - a.er) * (b.risk_limit - a.risk_limit) /
                                    (c.risk_limit - a.risk_limit);
    EXPECT_GE(b.er, chord - 1e-6);
  }
}

TEST(SweepFrontier, DroppingStdevTermDominatesPointwise) {
  const auto universe = toy_universe();
  const auto cs = build_constraints(universe, loose_caps());
  RiskConfig with;
  RiskConfig without;
  without.use_stdev = false;
  const auto grid = make_risk_grid(0.005, 0.30, 12);
  const auto full = sweep_frontier(universe, toy_er(), cs, with, grid);
  const auto ablated = sweep_frontier(universe, toy_er(), cs, without, grid);
  for (size_t i = 0; i < grid.size(); ++i)
    EXPECT_GE(ablated[i].er, full[i].er - 1e-9);
}

TEST(SweepFrontier, RejectsNonIncreasingGrid) {
  const auto universe = toy_universe();
  RiskConfig cfg;
  EXPECT_THROW(sweep_frontier(universe, toy_er(), ConstraintSet{}, cfg, {0.1, 0.1}),
               std::invalid_argument);
}

TEST(FitFrontier, NoiselessRoundTripRecoversParameters) {
  const double a = 0.08, b = 0.05;
  std::vector<FrontierPoint> pts;
  for (double r : make_risk_grid(0.005, 0.40, 10))
    pts.push_back({r, frontier_model(a, b, r), ""});
  const auto fit = fit_frontier(pts);
  EXPECT_NEAR(fit.a, a, 1e-6);
  EXPECT_NEAR(fit.b, b, 1e-6);
  EXPECT_LT(fit.rmse, 1e-9);
}

TEST(FitFrontier, FittedGradientAtOriginIsAOverB) {
  const auto universe = toy_universe();
  RiskConfig cfg;
  const auto cs = build_constraints(universe, loose_caps());
  const auto points = sweep_frontier(universe, toy_er(), cs, cfg, make_risk_grid());
  const auto fit = fit_frontier(points);
  const double h = 1e-9;
  const double slope = (frontier_model(fit.a, fit.b, h) - frontier_model(fit.a, fit.b, 0.0)) / h;
  EXPECT_NEAR(slope, fit.a / fit.b, 1e-4 * fit.a / fit.b);
}

TEST(FitFrontier, NoisyRecoveryWithinRepeatFitSpread) {
  // oracle: the dispersion of the fit under repeated noise draws
  const double a = 0.08, b = 0.05, noise = 1e-4;
  const auto grid = make_risk_grid(0.005, 0.40, 10);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, noise);
  std::vector<double> a_hats, b_hats;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<FrontierPoint> pts;
    for (double r : grid) pts.push_back({r, frontier_model(a, b, r) + n(gen), ""});
    const auto fit = fit_frontier(pts);
    a_hats.push_back(fit.a);
    b_hats.push_back(fit.b);
  }
  auto sd = [](const std::vector<double>& v) {
    double m = 0.0, s = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
  };
  // the first draw is this test's "single observed fit"
  EXPECT_NEAR(a_hats[0], a, 3.0 * sd(a_hats) + 1e-12);
  EXPECT_NEAR(b_hats[0], b, 3.0 * sd(b_hats) + 1e-12);
}

TEST(FitFrontier, UnderdeterminedAndDegenerateInputsThrow) {
  std::vector<FrontierPoint> two = {{0.01, 0.001, ""}, {0.02, 0.002, ""}};
  EXPECT_THROW(fit_frontier(two), std::invalid_argument);
  std::vector<FrontierPoint> zeros = {{0.01, 0.0, ""}, {0.02, 0.0, ""}, {0.03, 0.0, ""}};
  EXPECT_THROW(fit_frontier(zeros), std::invalid_argument);
}

TEST(FactorizeSeries, ExactPowerLawRecovered) {
  std::vector<double> a, b;
  std::vector<std::string> dates;
  for (int i = 0; i < 12; ++i) {
    const double at = 0.05 + 0.005 * i;
    a.push_back(at);
    b.push_back(0.3 * std::pow(at, 0.66));
    dates.push_back("2020-01-" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1));
  }
  const auto f = factorize_series(dates, a, b);
  EXPECT_NEAR(f.p, 0.66, 1e-10);
  for (double bs : f.b_star) EXPECT_NEAR(bs, 0.3, 1e-10);
  EXPECT_NEAR(f.residual_corr, 0.0, 1e-10);
}

TEST(FactorizeSeries, NoisySlopeWithinOlsConfidenceBand) {
  const double p_true = 0.5;
  std::mt19937_64 gen(9);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> a, b;
  for (int i = 0; i < 80; ++i) {
    const double la = -3.0 + 0.02 * i;
    a.push_back(std::exp(la));
    b.push_back(std::exp(std::log(0.4) + p_true * la + noise(gen)));
  }
  const auto f = factorize_series({}, a, b);
  // OLS slope standard error with the known noise level
  double ma = 0.0;
  for (double x : a) ma += std::log(x);
  ma /= a.size();
  double sxx = 0.0;
  for (double x : a) sxx += (std::log(x) - ma) * (std::log(x) - ma);
  const double se = 0.05 / std::sqrt(sxx);
  EXPECT_NEAR(f.p, p_true, 4.0 * se);
}

TEST(FactorizeSeries, ResidualOrthogonalityByConstruction) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> uni(0.02, 0.2);
  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back(uni(gen));
    b.push_back(uni(gen));
  }
  const auto f = factorize_series({}, a, b);
  EXPECT_NEAR(f.residual_corr, 0.0, 1e-10);
}

TEST(FactorizeSeries, ConstantASeriesThrows) {
  std::vector<double> a(5, 0.08), b = {0.01, 0.02, 0.03, 0.02, 0.01};
  EXPECT_THROW(factorize_series({}, a, b), std::invalid_argument);
}

TEST(FitOu, ZeroNoiseDecayRecoversK) {
  const double dt = 0.25;
  const double k1 = 1.0, k2 = 0.5;
  const double phi1 = std::exp(-k1 * dt), phi2 = std::exp(-k2 * dt);
  std::vector<std::array<double, 2>> x;
  double x1 = 1.0, x2 = -1.0;
  for (int i = 0; i < 40; ++i) {
    x.push_back({x1, x2});
    x1 *= phi1;
    x2 *= phi2;
  }
  const auto fit = fit_ou(x, dt);
  ASSERT_TRUE(fit.mean_reverting);
  EXPECT_NEAR(fit.k11, k1, 1e-6);
  EXPECT_NEAR(fit.k22, k2, 1e-6);
  EXPECT_NEAR(fit.k12, 0.0, 1e-6);
  EXPECT_NEAR(fit.k21, 0.0, 1e-6);
  EXPECT_NEAR(fit.mean1, 0.0, 1e-8);
  EXPECT_NEAR(fit.mean2, 0.0, 1e-8);
}

TEST(FitOu, NoisyEstimateWithinSimulationSpread) {
  // simulation oracle: empirical sd of K-hat across independent runs
  const double dt = 0.25;
  const double k1 = 1.0, k2 = 0.5;
  const double phi1 = std::exp(-k1 * dt), phi2 = std::exp(-k2 * dt);
  const double q = 0.05;
  auto run = [&](std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n(0.0, q);
    std::vector<std::array<double, 2>> x;
    double x1 = 0.5, x2 = -0.5;
    for (int i = 0; i < 200; ++i) {
      x.push_back({x1, x2});
      x1 = phi1 * x1 + n(gen);
      x2 = phi2 * x2 + n(gen);
    }
    return fit_ou(x, dt);
  };
  std::vector<double> k11s, k22s;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const auto f = run(s);
    if (!f.mean_reverting) continue;
    k11s.push_back(f.k11);
    k22s.push_back(f.k22);
  }
  ASSERT_GT(k11s.size(), 150u);
  auto sd = [](const std::vector<double>& v) {
    double m = 0.0, s = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
  };
  const auto f0 = run(1);
  EXPECT_NEAR(f0.k11, k1, 3.0 * sd(k11s));
  EXPECT_NEAR(f0.k22, k2, 3.0 * sd(k22s));
}

TEST(FitOu, ConstantSeriesThrowsAndExplosiveIsFlagged) {
  std::vector<std::array<double, 2>> flat(20, {0.1, 0.2});
  EXPECT_THROW(fit_ou(flat, 0.25), std::invalid_argument);

  // explosive: phi > 1
  std::vector<std::array<double, 2>> x;
  double x1 = 0.01, x2 = 0.02;
  for (int i = 0; i < 20; ++i) {
    x.push_back({x1, x2});
    x1 *= 1.2;
    x2 *= 1.1;
  }
  const auto f = fit_ou(x, 0.25);
  EXPECT_FALSE(f.mean_reverting);
}

TEST(FitOu, TooFewObservationsThrows) {
  std::vector<std::array<double, 2>> x(5, {0.1, 0.2});
  EXPECT_THROW(fit_ou(x, 0.25), std::invalid_argument);
}

// --- sign tests on synthetic shocks -----------------------------------------

namespace {

FrontierFit fit_for(const std::vector<Sleeve>& universe, const std::vector<double>& er,
                    const RiskConfig& cfg) {
  const auto cs = build_constraints(universe, loose_caps());
  const auto points = sweep_frontier(universe, er, cs, cfg, make_risk_grid(0.005, 0.5, 14));
  return fit_frontier(points);
}

}  // namespace

TEST(SignCases, SpreadDoublingWithCsx2BindingRaisesBothFactors) {
  // z* just above the current spreads keeps CSL small: CSx2 binds before the
  // shock and, with spreads through the stress level, after it too
  std::vector<Sleeve> base = {credit_sleeve("a", "BB", 0.02, 0.6, 0.03),
                              credit_sleeve("b", "B", 0.04, 0.4, 0.05),
                              credit_sleeve("c", "BB-", 0.03, 0.5, 0.04)};
  std::vector<Sleeve> shocked = base;
  std::vector<double> er_base, er_shocked;
  for (auto& s : shocked) {
    s.spread *= 2.0;
    s.yield = 0.02 + s.spread;
    s.coupon = s.yield;
  }
  for (const auto& s : base) er_base.push_back(s.spread * 0.7);
  for (const auto& s : shocked) er_shocked.push_back(s.spread * 0.7);
  RiskConfig cfg;
  const auto f0 = fit_for(base, er_base, cfg);
  const auto f1 = fit_for(shocked, er_shocked, cfg);
  EXPECT_GT(f1.a, f0.a);
  EXPECT_GT(f1.b, f0.b);
}

TEST(SignCases, SpreadRiseWithCslBindingRaisesAAndLowersB) {
  // z* close to current spreads makes CSL the binding measure; wider spreads
  // then reduce the stress loss while raising carry
  std::vector<Sleeve> base = {credit_sleeve("a", "BB", 0.030, 0.6, 0.175),
                              credit_sleeve("b", "B", 0.050, 0.4, 0.20),
                              credit_sleeve("c", "BB-", 0.040, 0.5, 0.19)};
  std::vector<Sleeve> shocked = base;
  std::vector<double> er_base, er_shocked;
  for (auto& s : shocked) {
    s.spread *= 1.8;
    s.yield = 0.02 + s.spread;
    s.coupon = s.yield;
  }
  for (const auto& s : base) er_base.push_back(s.spread * 0.7);
  for (const auto& s : shocked) er_shocked.push_back(s.spread * 0.7);
  RiskConfig cfg;
  const auto f0 = fit_for(base, er_base, cfg);
  const auto f1 = fit_for(shocked, er_shocked, cfg);
  EXPECT_GT(f1.a, f0.a);
  EXPECT_LT(f1.b, f0.b);
}

TEST(SignCases, SteepeningWithRateMeasureBindingRaisesA) {
  // fixed-rate treasuries; ER rises with curve slope (rolldown), the +2%
  // rate-shock loss is unchanged
  auto tsy = [](const std::string& name, double maturity, double er_slope) {
    Sleeve s;
    s.name = name;
    s.maturity = maturity;
    s.rating = Rating::parse("AAA");
    s.spread = 0.0;
    s.yield = 0.025;
    s.coupon = s.yield;
    s.frequency = 2;
    const auto dc = duration_convexity(maturity, s.coupon, 2, s.yield);
    s.dur_ir = dc.duration;
    s.dur_cr = dc.duration;
    s.max_weight = 0.8;
    (void)er_slope;
    return s;
  };
  std::vector<Sleeve> universe = {tsy("t2", 2, 0.0), tsy("t10", 10, 0.0),
                                  tsy("t30", 30, 0.0)};
  // rolldown ER proportional to duration times curve slope
  auto er_for = [&](double slope_per_year) {
    std::vector<double> er;
    for (const auto& s : universe) er.push_back(s.dur_ir * slope_per_year * 0.001);
    return er;
  };
  RiskConfig cfg;
  cfg.sigma_y = 0.007;  // keep the +2% loss, not the stdev, binding at 30y
  const auto f0 = fit_for(universe, er_for(1.0), cfg);
  const auto f1 = fit_for(universe, er_for(1.8), cfg);  // steeper curve
  EXPECT_GT(f1.a, f0.a);
}

// --- backtest ---------------------------------------------------------------

namespace {

RatingCurveSet simple_curves() {
  RatingCurveSet c;
  c.tenors = {0.25, 1, 2, 5, 10, 30};
  c.riskfree = {0.020, 0.021, 0.022, 0.025, 0.028, 0.030};
  auto flat = [&](const char* label, double lo, double hi) {
    std::vector<double> v;
    for (double t : c.tenors) v.push_back(lo + (hi - lo) * t / 30.0);
    c.spreads[Rating::parse(label).index()] = v;
  };
  flat("AAA", 0.0002, 0.0010);
  flat("AA", 0.0040, 0.0060);
  flat("A", 0.0080, 0.0110);
  flat("BBB", 0.0140, 0.0180);
  flat("BB", 0.0300, 0.0380);
  flat("B", 0.0480, 0.0550);
  flat("CCC", 0.0850, 0.0950);
  return c;
}

TransitionMatrix simple_transitions() {
  auto r = [](const char* l) { return Rating::parse(l); };
  return TransitionMatrix(
      {r("AAA"), r("AA"), r("A"), r("BBB"), r("BB"), r("B"), r("CCC"), r("D")},
      {0.9081, 0.0833, 0.0068, 0.0006, 0.0012, 0.0000, 0.0000, 0.0000,
       0.0070, 0.9065, 0.0779, 0.0064, 0.0006, 0.0014, 0.0002, 0.0000,
       0.0009, 0.0227, 0.9104, 0.0552, 0.0074, 0.0026, 0.0002, 0.0006,
       0.0002, 0.0033, 0.0595, 0.8692, 0.0530, 0.0117, 0.0013, 0.0018,
       0.0003, 0.0014, 0.0067, 0.0773, 0.8052, 0.0884, 0.0101, 0.0106,
       0.0000, 0.0011, 0.0024, 0.0043, 0.0648, 0.8345, 0.0409, 0.0520,
       0.0022, 0.0000, 0.0022, 0.0130, 0.0238, 0.1124, 0.6485, 0.1979,
       0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000});
}

std::vector<Sleeve> backtest_universe() {
  std::vector<Sleeve> u = {credit_sleeve("ig", "A", 0.010, 0.8, 0.05, false),
                           credit_sleeve("xover", "BB", 0.034, 0.5, 0.12, false),
                           credit_sleeve("hy", "B", 0.051, 0.3, 0.16, false)};
  for (auto& s : u) s.high_yield = !s.rating.is_investment_grade();
  return u;
}

MarketSeries constant_series(const std::vector<Sleeve>& universe,
                             const RatingCurveSet& curves, int n_dates) {
  MarketSeries series;
  series.rf_tenors = curves.tenors;
  for (const auto& s : universe) series.sleeve_names.push_back(s.name);
  Date d{2020, 1, 6};
  for (int i = 0; i < n_dates; ++i) {
    series.dates.push_back(d.iso());
    MarketSnapshot snap;
    snap.riskfree = curves.riskfree;
    for (const auto& s : universe) {
      snap.sleeve_yield.push_back(s.yield);
      snap.sleeve_spread.push_back(s.spread);
    }
    series.snapshots.push_back(snap);
    d = d.plus_months(3);
  }
  return series;
}

}  // namespace

TEST(Backtest, ConstantMarketDataGivesConstantFactors) {
  const auto universe = backtest_universe();
  const auto curves = simple_curves();
  const auto series = constant_series(universe, curves, 5);
  RiskConfig cfg;
  const auto res = run_backtest(series, universe, loose_caps(), cfg,
                                make_risk_grid(0.005, 0.4, 12), simple_transitions(),
                                curves);
  ASSERT_TRUE(res.skipped.empty());
  ASSERT_EQ(res.by_date.size(), 5u);
  for (size_t i = 1; i < res.by_date.size(); ++i) {
    EXPECT_NEAR(res.by_date[i].fit.a, res.by_date[0].fit.a, 1e-12);
    EXPECT_NEAR(res.by_date[i].fit.b, res.by_date[0].fit.b, 1e-12);
  }
}

TEST(Backtest, PerDateResultsEqualIndependentRuns) {
  const auto universe = backtest_universe();
  const auto curves = simple_curves();
  auto series = constant_series(universe, curves, 3);
  // perturb the middle date
  for (auto& s : series.snapshots[1].sleeve_spread) s *= 1.3;
  for (size_t j = 0; j < universe.size(); ++j)
    series.snapshots[1].sleeve_yield[j] =
        series.snapshots[1].riskfree[3] + series.snapshots[1].sleeve_spread[j];
  RiskConfig cfg;
  const auto grid = make_risk_grid(0.005, 0.4, 10);
  const auto res = run_backtest(series, universe, loose_caps(), cfg, grid,
                                simple_transitions(), curves);
  ASSERT_EQ(res.by_date.size(), 3u);
  // re-run date 1 in isolation
  MarketSeries lone;
  lone.rf_tenors = series.rf_tenors;
  lone.sleeve_names = series.sleeve_names;
  lone.dates = {series.dates[1]};
  lone.snapshots = {series.snapshots[1]};
  const auto solo = run_backtest(lone, universe, loose_caps(), cfg, grid,
                                 simple_transitions(), curves);
  ASSERT_EQ(solo.by_date.size(), 1u);
  EXPECT_DOUBLE_EQ(res.by_date[1].fit.a, solo.by_date[0].fit.a);
  EXPECT_DOUBLE_EQ(res.by_date[1].fit.b, solo.by_date[0].fit.b);
}

TEST(Backtest, SpreadDoublingDateMovesBothFactorsUp) {
  std::vector<Sleeve> universe = {credit_sleeve("a", "BB", 0.02, 0.6, 0.03),
                                  credit_sleeve("b", "B", 0.04, 0.4, 0.05),
                                  credit_sleeve("c", "BB-", 0.03, 0.5, 0.04)};
  const auto curves = simple_curves();
  auto series = constant_series(universe, curves, 2);
  for (size_t j = 0; j < universe.size(); ++j) {
    series.snapshots[1].sleeve_spread[j] *= 2.0;
    series.snapshots[1].sleeve_yield[j] += universe[j].spread;
  }
  RiskConfig cfg;
  const auto res = run_backtest(series, universe, loose_caps(), cfg,
                                make_risk_grid(0.005, 0.5, 12), simple_transitions(),
                                curves);
  ASSERT_EQ(res.by_date.size(), 2u);
  EXPECT_GT(res.by_date[1].fit.a, res.by_date[0].fit.a);
  EXPECT_GT(res.by_date[1].fit.b, res.by_date[0].fit.b);
}

TEST(Backtest, BadDateIsSkippedAndRunContinues) {
  const auto universe = backtest_universe();
  const auto curves = simple_curves();
  auto series = constant_series(universe, curves, 3);
  series.snapshots[1].sleeve_yield[0] = -5.0;  // breaks repricing on date 1
  RiskConfig cfg;
  const auto res = run_backtest(series, universe, loose_caps(), cfg,
                                make_risk_grid(0.01, 0.3, 8), simple_transitions(),
                                curves);
  EXPECT_EQ(res.by_date.size(), 2u);
  ASSERT_EQ(res.skipped.size(), 1u);
  EXPECT_EQ(res.skipped[0].substr(0, 10), series.dates[1]);
}

TEST(BusinessDays, WeekdayCountAndYearFraction) {
  const Date mon{2024, 1, 1};  // a Monday
  EXPECT_EQ(mon.weekday(), 0);
  EXPECT_EQ(business_days_between(mon, mon.plus_days(7)), 5);
  EXPECT_EQ(business_days_between(mon, mon.plus_days(14)), 10);
  EXPECT_NEAR(year_fraction(mon, mon.plus_days(14)), 10.0 / 260.0, 1e-15);
  EXPECT_EQ(Date::parse("2024-02-29").plus_months(12).iso(), "2025-02-28");
}
