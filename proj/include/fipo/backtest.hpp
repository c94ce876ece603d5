#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fipo/credit.hpp"
#include "fipo/frontier.hpp"
#include "fipo/optimize.hpp"
#include "fipo/risk.hpp"
#include "fipo/sleeve.hpp"

namespace fipo {

// ---------------------------------------------------------------------------
// calendar helpers (ISO dates, weekday business-day count, 260-day year)

struct Date {
  int year = 2000, month = 1, day = 1;

  static Date parse(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
      throw std::invalid_argument("Date: expected YYYY-MM-DD, got '" + iso + "'");
    Date d;
    d.year = std::stoi(iso.substr(0, 4));
    d.month = std::stoi(iso.substr(5, 2));
    d.day = std::stoi(iso.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
      throw std::invalid_argument("Date: out of range '" + iso + "'");
    return d;
  }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
  }

  // days since civil epoch (Howard Hinnant's algorithm)
  long serial() const {
    int y = year - (month <= 2);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097L + static_cast<long>(doe) - 719468L;
  }

  int weekday() const {  // 0 = Monday .. 6 = Sunday
    long s = serial();
    return static_cast<int>(((s % 7) + 10) % 7);
  }

  Date plus_days(int n) const;
  Date plus_months(int n) const {
    int m = month - 1 + n;
    int y = year + m / 12;
    m %= 12;
    if (m < 0) {
      m += 12;
      --y;
    }
    static const int dim[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int d = std::min(day, dim[m] + ((m == 1 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) ? 1 : 0));
    return {y, m + 1, d};
  }
};

inline Date date_from_serial(long serial) {
  long z = serial + 719468L;
  const long era = (z >= 0 ? z : z - 146096L) / 146097L;
  const unsigned doe = static_cast<unsigned>(z - era * 146097L);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

inline Date Date::plus_days(int n) const { return date_from_serial(serial() + n); }

inline int business_days_between(const Date& from, const Date& to) {
  if (to.serial() < from.serial()) return -business_days_between(to, from);
  int count = 0;
  for (long s = from.serial(); s < to.serial(); ++s)
    if (date_from_serial(s + 1).weekday() < 5) ++count;
  return count;
}

/// Year fraction between dates on the 260 business-day convention used by the
/// volatility parameters.
inline double year_fraction(const Date& from, const Date& to) {
  return business_days_between(from, to) / 260.0;
}

// ---------------------------------------------------------------------------
// market history

struct MarketSnapshot {
  std::vector<double> riskfree;      // zero rates on the series tenor grid
  std::vector<double> sleeve_yield;  // per sleeve, universe order
  std::vector<double> sleeve_spread;
};

struct MarketSeries {
  std::vector<std::string> sleeve_names;
  std::vector<double> rf_tenors;
  std::vector<std::string> dates;  // strictly increasing ISO dates
  std::vector<MarketSnapshot> snapshots;

  void validate() const {
    if (dates.size() != snapshots.size())
      throw std::invalid_argument("MarketSeries: date/snapshot size mismatch");
    for (size_t i = 1; i < dates.size(); ++i)
      if (Date::parse(dates[i]).serial() <= Date::parse(dates[i - 1]).serial())
        throw std::invalid_argument("MarketSeries: dates must be strictly increasing");
    for (const auto& s : snapshots) {
      if (s.riskfree.size() != rf_tenors.size() ||
          s.sleeve_yield.size() != sleeve_names.size() ||
          s.sleeve_spread.size() != sleeve_names.size())
        throw std::invalid_argument("MarketSeries: snapshot shape mismatch");
      for (double sp : s.sleeve_spread)
        if (sp < 0.0) throw std::invalid_argument("MarketSeries: negative spread");
    }
  }
};

// ---------------------------------------------------------------------------
// per-date sleeve state and expected returns

/// Per-sleeve ER over the horizon: the carry/rolldown/migration decomposition
/// priced on the sleeve's own curve. Each sleeve's rating curve is anchored
/// at its market spread (the whole curve set is shifted in parallel, so the
/// inter-rating downgrade gaps come from the static curve file and the
/// cheapness term vanishes). Floating sleeves are priced against a flat curve
/// at the front-end rate: no rolldown, carry = spread.
inline std::vector<double> sleeve_expected_returns(const std::vector<Sleeve>& sleeves,
                                                   const RatingCurveSet& curves,
                                                   const TransitionMatrix& annual,
                                                   double horizon_years) {
  std::vector<double> er(sleeves.size(), 0.0);
  const double front_end = curves.riskfree_rate(curves.tenors.front());
  for (size_t j = 0; j < sleeves.size(); ++j) {
    const Sleeve& s = sleeves[j];
    if (!(s.maturity > horizon_years))
      throw std::invalid_argument("sleeve_expected_returns: " + s.name +
                                  " matures inside the horizon");
    RatingCurveSet own = s.floating ? curves.with_flat_riskfree(front_end) : curves;
    const double offset = s.spread - own.spread(s.rating, s.maturity);
    own = own.shifted(offset);
    const double p0 = price_on_rating_curve(s.rating, s.maturity, s.coupon,
                                            s.frequency, own);
    er[j] = expected_total_return({s.maturity, s.coupon, s.frequency}, s.rating,
                                  p0, own, annual, horizon_years)
                .total;
  }
  return er;
}

/// Rebuild the universe for one market snapshot: yields and spreads from the
/// series, durations recomputed at the new yields, coupons kept from the
/// template.
inline std::vector<Sleeve> sleeves_at_snapshot(const std::vector<Sleeve>& tmpl,
                                               const MarketSnapshot& snap) {
  if (snap.sleeve_yield.size() != tmpl.size())
    throw std::invalid_argument("sleeves_at_snapshot: size mismatch");
  std::vector<Sleeve> out = tmpl;
  for (size_t j = 0; j < out.size(); ++j) {
    out[j].yield = snap.sleeve_yield[j];
    out[j].spread = snap.sleeve_spread[j];
    const auto dc = duration_convexity(out[j].maturity, out[j].coupon,
                                       out[j].frequency, out[j].yield);
    out[j].dur_cr = dc.duration;
    out[j].dur_ir = out[j].floating ? 0.0 : dc.duration;
    out[j].validate();
  }
  return out;
}

/// RatingCurveSet with the riskfree row replaced by the snapshot's curve.
inline RatingCurveSet curves_at_snapshot(const RatingCurveSet& static_curves,
                                         const std::vector<double>& rf_tenors,
                                         const std::vector<double>& rf_rates) {
  if (rf_tenors != static_curves.tenors) {
    // re-sample the snapshot riskfree curve onto the static tenor grid
    RatingCurveSet tmp = static_curves;
    RatingCurveSet probe;
    probe.tenors = rf_tenors;
    probe.riskfree = rf_rates;
    for (size_t k = 0; k < tmp.tenors.size(); ++k)
      tmp.riskfree[k] = probe.riskfree_rate(tmp.tenors[k]);
    return tmp;
  }
  RatingCurveSet out = static_curves;
  out.riskfree = rf_rates;
  return out;
}

struct DateResult {
  std::string date;
  std::vector<FrontierPoint> points;
  FrontierFit fit;
};

struct BacktestResult {
  std::vector<DateResult> by_date;
  std::optional<FactorSeries> factors;        // needs >= 3 successful dates
  std::optional<OuFit> ou;                    // needs >= 10 successful dates
  std::vector<std::string> skipped;           // "date: reason" per failed date
};

/// Full backtest: per date, rebuild the universe state, recompute expected
/// returns, sweep the frontier and fit the two-parameter model; then extract
/// the factor series. Dates that fail (missing data, degenerate fits) are
/// reported and skipped, the run continues.
inline BacktestResult run_backtest(const MarketSeries& series,
                                   const std::vector<Sleeve>& universe_template,
                                   const ConstraintCaps& caps,
                                   const RiskConfig& risk_cfg,
                                   const std::vector<double>& grid,
                                   const TransitionMatrix& transitions,
                                   const RatingCurveSet& static_curves,
                                   double horizon_years = 1.0) {
  series.validate();
  BacktestResult result;
  for (size_t d = 0; d < series.dates.size(); ++d) {
    try {
      const std::vector<Sleeve> sleeves =
          sleeves_at_snapshot(universe_template, series.snapshots[d]);
      const RatingCurveSet curves = curves_at_snapshot(
          static_curves, series.rf_tenors, series.snapshots[d].riskfree);
      const std::vector<double> er =
          sleeve_expected_returns(sleeves, curves, transitions, horizon_years);
      const ConstraintSet constraints = build_constraints(sleeves, caps);
      DateResult dr;
      dr.date = series.dates[d];
      dr.points = sweep_frontier(sleeves, er, constraints, risk_cfg, grid);
      dr.fit = fit_frontier(dr.points);
      dr.fit.date = dr.date;
      result.by_date.push_back(std::move(dr));
    } catch (const std::exception& e) {
      result.skipped.push_back(series.dates[d] + ": " + e.what());
    }
  }

  std::vector<std::string> dates;
  std::vector<double> a, b;
  for (const auto& dr : result.by_date) {
    if (dr.fit.a > 0.0 && dr.fit.b > 0.0) {
      dates.push_back(dr.date);
      a.push_back(dr.fit.a);
      b.push_back(dr.fit.b);
    }
  }
  if (dates.size() >= 3) {
    try {
      result.factors = factorize_series(dates, a, b);
    } catch (const std::exception&) {
      // constant factor series: leave factors unset
    }
  }
  if (dates.size() >= 10 && result.factors) {
    std::vector<std::array<double, 2>> x(dates.size());
    for (size_t i = 0; i < dates.size(); ++i)
      x[i] = {std::log(a[i]), std::log(b[i])};
    const double dt = dates.size() > 1
                          ? year_fraction(Date::parse(dates.front()),
                                          Date::parse(dates.back())) /
                                static_cast<double>(dates.size() - 1)
                          : 0.25;
    try {
      result.ou = fit_ou(x, dt > 0.0 ? dt : 0.25);
    } catch (const std::exception&) {
      // degenerate OU regression: leave unset
    }
  }
  return result;
}

}  // namespace fipo
