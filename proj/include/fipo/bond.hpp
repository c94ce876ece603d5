#pragma once

#include <cmath>
#include <stdexcept>

namespace fipo {

/// Bullet-bond analytics on stylised sleeves. Prices are clean, quoted as a
/// fraction of par, and always observed on a coupon date; yields compound m
/// times per year. Maturities that are not a whole number of coupon periods
/// are rounded to the nearest period.

struct BulletBond {
  double maturity_years = 0.0;  // T
  double coupon_rate = 0.0;     // c, annual, fraction of par
  int payments_per_year = 2;    // m

  void validate() const {
    if (!(maturity_years > 0.0))
      throw std::invalid_argument("BulletBond: maturity must be positive");
    if (payments_per_year < 1)
      throw std::invalid_argument("BulletBond: payments_per_year must be >= 1");
  }
};

struct PriceQuote {
  double clean_price = 1.0;  // fraction of par
  double yield_value = 0.0;  // per annum, compounded m times
};

inline long coupon_period_count(double maturity_years, int payments_per_year) {
  long n = std::lround(maturity_years * payments_per_year);
  return n < 1 ? 1 : n;
}

/// Price of a bullet bond of maturity T, coupon c paid m times a year, at
/// yield y:  P = (1+y/m)^{-mT} + c (1-(1+y/m)^{-mT})/y.
/// At y = 0 the continuous limit 1 + cT applies.
inline double price_bullet(double maturity_years, double coupon_rate,
                           int payments_per_year, double yield_value) {
  BulletBond{maturity_years, coupon_rate, payments_per_year}.validate();
  const double m = static_cast<double>(payments_per_year);
  if (1.0 + yield_value / m <= 0.0)
    throw std::domain_error("price_bullet: 1 + y/m must be positive");
  const long n = coupon_period_count(maturity_years, payments_per_year);
  if (yield_value == 0.0)
    return 1.0 + coupon_rate * static_cast<double>(n) / m;
  const double disc = std::pow(1.0 + yield_value / m, -static_cast<double>(n));
  return disc + coupon_rate * (1.0 - disc) / yield_value;
}

struct DurationConvexity {
  double duration = 0.0;   // modified, years:  -(1/P) dP/dy
  double convexity = 0.0;  // years^2:           (1/P) d2P/dy2
};

/// Analytic modified duration and convexity, from the discounted cashflow sum
/// (identical to differentiating the closed-form price).
inline DurationConvexity duration_convexity(double maturity_years,
                                            double coupon_rate,
                                            int payments_per_year,
                                            double yield_value) {
  BulletBond{maturity_years, coupon_rate, payments_per_year}.validate();
  const double m = static_cast<double>(payments_per_year);
  if (1.0 + yield_value / m <= 0.0)
    throw std::domain_error("duration_convexity: 1 + y/m must be positive");
  const long n = coupon_period_count(maturity_years, payments_per_year);
  const double base = 1.0 + yield_value / m;
  double p = 0.0, dp = 0.0, d2p = 0.0;
  for (long k = 1; k <= n; ++k) {
    const double cf = coupon_rate / m + (k == n ? 1.0 : 0.0);
    const double tk = static_cast<double>(k) / m;
    const double df = std::pow(base, -static_cast<double>(k));
    p += cf * df;
    dp -= cf * tk * df / base;
    d2p += cf * tk * (tk + 1.0 / m) * df / (base * base);
  }
  return {-dp / p, d2p / p};
}

/// Credit stress loss: effect of moving a par bond's yield from y0 to the
/// stress level y*:  CSL = (1 - y0/y*) (1 - (1+y*/m)^{-mT}).
/// Equals 1 - price_bullet(T, y0, m, y*). Negative when y0 > y* (a gain).
inline double stress_loss(double maturity_years, double current_yield,
                          int payments_per_year, double stress_yield) {
  if (!(stress_yield > 0.0))
    throw std::domain_error("stress_loss: stress yield must be positive");
  if (current_yield < 0.0)
    throw std::invalid_argument("stress_loss: current yield must be >= 0");
  BulletBond{maturity_years, current_yield, payments_per_year}.validate();
  const double m = static_cast<double>(payments_per_year);
  const long n = coupon_period_count(maturity_years, payments_per_year);
  const double disc = std::pow(1.0 + stress_yield / m, -static_cast<double>(n));
  return (1.0 - current_yield / stress_yield) * (1.0 - disc);
}

/// Solve price_bullet(T, c, m, y) = P for y on [y_lo, y_hi]. Bisection first,
/// then a bracketed secant polish; tolerance 1e-10 on price. The default
/// bracket admits moderately negative yields; a price above the attainable
/// range on the bracket (e.g. above the undiscounted cashflow sum) is a
/// no-root error.
inline double yield_from_price(double maturity_years, double coupon_rate,
                               int payments_per_year, double price,
                               double y_lo = -0.10, double y_hi = 10.0) {
  if (!(price > 0.0))
    throw std::invalid_argument("yield_from_price: price must be positive");
  const double tol = 1e-10;
  auto f = [&](double y) {
    return price_bullet(maturity_years, coupon_rate, payments_per_year, y) - price;
  };
  double lo = y_lo, hi = y_hi;
  double f_lo = f(lo), f_hi = f(hi);
  if (std::fabs(f_lo) < tol) return lo;
  if (std::fabs(f_hi) < tol) return hi;
  if (f_lo < 0.0 || f_hi > 0.0)
    throw std::runtime_error("yield_from_price: no root, price outside attainable range");
  // price is strictly decreasing in y, so f_lo > 0 > f_hi on a valid bracket
  for (int it = 0; it < 200; ++it) {
    double mid;
    if (it < 30) {
      mid = 0.5 * (lo + hi);
    } else {
      mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);  // secant on the bracket
      const double w = hi - lo;
      if (!(mid > lo + 1e-3 * w && mid < hi - 1e-3 * w)) mid = 0.5 * (lo + hi);
    }
    const double fm = f(mid);
    if (std::fabs(fm) < tol) return mid;
    if (fm > 0.0) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fipo
