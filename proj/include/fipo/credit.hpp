#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fipo/bond.hpp"
#include "fipo/rating.hpp"

namespace fipo {

struct RecoveryAssumption {
  double recovery_rate = 0.30;  // fraction of par paid at default
  void validate() const {
    if (recovery_rate < 0.0 || recovery_rate >= 1.0)
      throw std::invalid_argument("RecoveryAssumption: recovery must be in [0,1)");
  }
};

/// Row-stochastic one-period rating migration matrix; the last state is the
/// absorbing default state D.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(std::vector<Rating> states, std::vector<double> probs)
      : states_(std::move(states)), p_(std::move(probs)) {
    validate();
  }

  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<Rating>& states() const { return states_; }
  double at(int i, int j) const { return p_[i * size() + j]; }
  double& at(int i, int j) { return p_[i * size() + j]; }

  /// Row index of a rating: exact state first, then its whole-letter bucket
  /// (published matrices are letter-grade).
  int row_of(Rating r) const {
    for (int i = 0; i < size(); ++i)
      if (states_[i] == r) return i;
    const Rating letter = r.whole_letter();
    for (int i = 0; i < size(); ++i)
      if (states_[i] == letter) return i;
    throw std::invalid_argument(std::string("TransitionMatrix: no row for rating ") + r.label());
  }

  double default_prob(Rating from) const { return at(row_of(from), size() - 1); }

  void validate() {
    const int n = size();
    if (n < 2 || p_.size() != static_cast<size_t>(n) * n)
      throw std::invalid_argument("TransitionMatrix: need a square matrix with >= 2 states");
    if (!states_.back().is_default())
      throw std::invalid_argument("TransitionMatrix: last state must be D");
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        double& v = p_[i * n + j];
        if (v < -1e-12 || v > 1.0 + 1e-12)
          throw std::invalid_argument("TransitionMatrix: probability outside [0,1]");
        v = std::clamp(v, 0.0, 1.0);
        sum += v;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("TransitionMatrix: row does not sum to 1");
      for (int j = 0; j < n; ++j) p_[i * n + j] /= sum;
    }
    for (int j = 0; j < n - 1; ++j)
      if (at(n - 1, j) != 0.0)
        throw std::invalid_argument("TransitionMatrix: default state must be absorbing");
    if (at(n - 1, n - 1) != 1.0)
      throw std::invalid_argument("TransitionMatrix: default state must be absorbing");
  }

 private:
  std::vector<Rating> states_;
  std::vector<double> p_;  // row-major
};

namespace detail {

inline TransitionMatrix multiply(const TransitionMatrix& a, const TransitionMatrix& b) {
  const int n = a.size();
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) out[i * n + j] += aik * b.at(k, j);
    }
  return TransitionMatrix(a.states(), std::move(out));
}

inline TransitionMatrix identity_like(const TransitionMatrix& m) {
  const int n = m.size();
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) out[i * n + i] = 1.0;
  return TransitionMatrix(m.states(), std::move(out));
}

inline TransitionMatrix integer_power(const TransitionMatrix& m, long k) {
  TransitionMatrix acc = identity_like(m);
  for (long i = 0; i < k; ++i) acc = multiply(acc, m);
  return acc;
}

}  // namespace detail

/// Migration probabilities over t years. Integer t is an exact matrix power.
/// Fractional t goes through the eigendecomposition M^t = V diag(lambda^t)
/// V^{-1} when that yields a clean stochastic matrix, otherwise falls back to
/// linear interpolation between the neighbouring integer powers.
inline TransitionMatrix transition_probabilities(const TransitionMatrix& m, double t) {
  if (t < 0.0) throw std::invalid_argument("transition_probabilities: t must be >= 0");
  const double rounded = std::round(t);
  if (std::fabs(t - rounded) < 1e-12)
    return detail::integer_power(m, static_cast<long>(rounded));

  const int n = m.size();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m.at(i, j);

  bool ok = false;
  std::vector<double> probs(static_cast<size_t>(n) * n, 0.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() == Eigen::Success) {
    Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::VectorXcd lam = es.eigenvalues();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
    if (lu.isInvertible()) {
      Eigen::VectorXcd lam_t(n);
      bool lam_ok = true;
      for (int i = 0; i < n; ++i) {
        if (std::abs(lam(i)) < 1e-14) { lam_ok = false; break; }
        lam_t(i) = std::exp(std::log(lam(i)) * t);  // principal branch
      }
      if (lam_ok) {
        Eigen::MatrixXcd r = v * lam_t.asDiagonal() * lu.inverse();
        ok = true;
        for (int i = 0; i < n && ok; ++i) {
          double sum = 0.0;
          for (int j = 0; j < n; ++j) {
            const std::complex<double> z = r(i, j);
            if (std::fabs(z.imag()) > 1e-9 || z.real() < -1e-9 || z.real() > 1.0 + 1e-9) {
              ok = false;
              break;
            }
            probs[i * n + j] = std::clamp(z.real(), 0.0, 1.0);
            sum += probs[i * n + j];
          }
          if (ok && std::fabs(sum - 1.0) > 1e-8) ok = false;
        }
      }
    }
  }
  if (ok) return TransitionMatrix(m.states(), std::move(probs));

  const long k = static_cast<long>(std::floor(t));
  const double f = t - k;
  TransitionMatrix lo = detail::integer_power(m, k);
  TransitionMatrix hi = detail::multiply(lo, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      probs[i * n + j] = (1.0 - f) * lo.at(i, j) + f * hi.at(i, j);
  return TransitionMatrix(m.states(), std::move(probs));
}

/// Per-rating spread curves over maturity plus the riskfree zero curve, all
/// piecewise-linear on a shared tenor grid. Discounting uses annually
/// restated zero rates: B_0(t) = (1 + r(t))^{-t}.
class RatingCurveSet {
 public:
  std::vector<double> tenors;
  std::vector<double> riskfree;  // zero rates at tenors
  std::map<int, std::vector<double>> spreads;  // rating notch index -> curve
  RecoveryAssumption recovery;

  double riskfree_rate(double maturity) const { return interp(riskfree, maturity); }
  double discount(double t) const { return std::pow(1.0 + riskfree_rate(t), -t); }

  double spread(Rating r, double maturity) const {
    return interp(curve_for(r), maturity);
  }

  bool has_curve(Rating r) const {
    return spreads.count(r.index()) || spreads.count(r.whole_letter().index());
  }

  /// Load-time checks: nonnegative spreads, and worse rating => wider spread
  /// at every tenor.
  void validate() const {
    if (tenors.size() < 2 || riskfree.size() != tenors.size())
      throw std::invalid_argument("RatingCurveSet: need >= 2 tenors with riskfree rates");
    for (size_t k = 1; k < tenors.size(); ++k)
      if (tenors[k] <= tenors[k - 1])
        throw std::invalid_argument("RatingCurveSet: tenors must be increasing");
    recovery.validate();
    const std::vector<double>* prev = nullptr;
    for (const auto& [idx, curve] : spreads) {  // map is ordered by rating
      if (curve.size() != tenors.size())
        throw std::invalid_argument("RatingCurveSet: curve length mismatch");
      for (size_t k = 0; k < curve.size(); ++k) {
        if (curve[k] < 0.0)
          throw std::invalid_argument("RatingCurveSet: negative spread");
        if (prev && curve[k] < (*prev)[k] - 1e-12)
          throw std::invalid_argument(
              "RatingCurveSet: spreads must widen as ratings worsen (tenor " +
              std::to_string(tenors[k]) + ")");
      }
      prev = &curve;
    }
  }

  /// Same curves with a constant spread offset added to every rating, used to
  /// anchor a sleeve's own rating curve at its market spread.
  RatingCurveSet shifted(double spread_offset) const {
    RatingCurveSet out = *this;
    for (auto& [idx, curve] : out.spreads)
      for (double& s : curve) s += spread_offset;
    return out;
  }

  /// Same rating gaps on a flat riskfree curve, used for floating sleeves.
  RatingCurveSet with_flat_riskfree(double rate) const {
    RatingCurveSet out = *this;
    std::fill(out.riskfree.begin(), out.riskfree.end(), rate);
    return out;
  }

 private:
  const std::vector<double>& curve_for(Rating r) const {
    auto it = spreads.find(r.index());
    if (it == spreads.end()) it = spreads.find(r.whole_letter().index());
    if (it == spreads.end())
      throw std::invalid_argument(std::string("RatingCurveSet: no curve for rating ") +
                                  r.label());
    return it->second;
  }

  double interp(const std::vector<double>& values, double x) const {
    if (x < tenors.front() - 1e-9 || x > tenors.back() + 1e-9)
      throw std::out_of_range("RatingCurveSet: maturity " + std::to_string(x) +
                              " outside curve range");
    x = std::clamp(x, tenors.front(), tenors.back());
    size_t hi = 1;
    while (hi + 1 < tenors.size() && tenors[hi] < x) ++hi;
    const double w = (x - tenors[hi - 1]) / (tenors[hi] - tenors[hi - 1]);
    return values[hi - 1] + w * (values[hi] - values[hi - 1]);
  }
};

/// Price of a (T, c, m) bullet in rating state i: riskfree rate at T plus the
/// rating's spread. The default state prices at the recovery value.
inline double price_on_rating_curve(Rating i, double maturity, double coupon,
                                    int frequency, const RatingCurveSet& curves) {
  if (i.is_default()) return curves.recovery.recovery_rate;
  const double y = curves.riskfree_rate(maturity) + curves.spread(i, maturity);
  return price_bullet(maturity, coupon, frequency, y);
}

/// Expected total return over horizon t, split as in the carry/migration/
/// cheapness decomposition:
///   carry_rolldown = c t + B_0(t) P_i(T-t,c) - P_i(T,c)
///   migration      = B_0(t) sum_j p_{i->j}(t) (P_j(T-t,c) - P_i(T-t,c))
///   cheapness      = P_i(T,c) - P_0
/// The sum telescopes to B_0(t) sum_j p_{i->j}(t) P_j(T-t,c) + c t - P_0.
struct TotalReturn {
  double carry_rolldown = 0.0;
  double migration = 0.0;
  double cheapness = 0.0;
  double total = 0.0;
};

inline TotalReturn expected_total_return(const BulletBond& bond, Rating current,
                                         double clean_price,
                                         const RatingCurveSet& curves,
                                         const TransitionMatrix& annual,
                                         double horizon_years,
                                         bool hazard_adjusted_accrual = false) {
  bond.validate();
  if (current.is_default())
    throw std::invalid_argument("expected_total_return: bond already in default");
  if (!(horizon_years > 0.0) || horizon_years >= bond.maturity_years)
    throw std::invalid_argument("expected_total_return: need 0 < t < T");

  const TransitionMatrix p_t = transition_probabilities(annual, horizon_years);
  const int row = p_t.row_of(current);
  const double t = horizon_years;
  const double rolled = bond.maturity_years - t;
  const double b0 = curves.discount(t);

  const double p_now =
      price_on_rating_curve(current, bond.maturity_years, bond.coupon_rate,
                            bond.payments_per_year, curves);
  const double p_rolled = price_on_rating_curve(
      current, rolled, bond.coupon_rate, bond.payments_per_year, curves);

  double accrual = bond.coupon_rate * t;
  if (hazard_adjusted_accrual) {
    const double pd1 = annual.default_prob(current);
    if (pd1 >= 1.0)
      throw std::invalid_argument("expected_total_return: hazard undefined at PD = 1");
    const double lambda = -std::log1p(-pd1);
    if (lambda > 1e-12) accrual = -std::expm1(-lambda * t) * bond.coupon_rate / lambda;
  }

  TotalReturn tr;
  tr.carry_rolldown = accrual + b0 * p_rolled - p_now;
  double mig = 0.0;
  for (int j = 0; j < p_t.size(); ++j) {
    const double pj = p_t.at(row, j);
    if (pj == 0.0) continue;
    const double price_j = price_on_rating_curve(
        p_t.states()[j], rolled, bond.coupon_rate, bond.payments_per_year, curves);
    mig += pj * (price_j - p_rolled);
  }
  tr.migration = b0 * mig;
  tr.cheapness = p_now - clean_price;
  tr.total = tr.carry_rolldown + tr.migration + tr.cheapness;
  return tr;
}

/// Minimum purchase yield at which the bond's expected total return is
/// nonnegative. The candidate yield moves the price (and hence the bond's
/// spread) while the rating curves stay fixed; TR is increasing in yield so
/// bisection applies. Resolved to 0.1bp.
inline double hurdle_yield(Rating current, double maturity, double coupon,
                           int frequency, const RatingCurveSet& curves,
                           const TransitionMatrix& annual, double horizon_years,
                           double riskfree_anchor) {
  auto tr_at = [&](double y) {
    const double p0 = price_bullet(maturity, coupon, frequency, y);
    return expected_total_return({maturity, coupon, frequency}, current, p0,
                                 curves, annual, horizon_years)
        .total;
  };
  double lo = riskfree_anchor - 0.05;
  double hi = riskfree_anchor + 0.60;
  double f_lo = tr_at(lo), f_hi = tr_at(hi);
  if (f_lo > 0.0 || f_hi < 0.0)
    throw std::runtime_error("hurdle_yield: no root in bracket");
  if (f_lo == 0.0) return lo;
  for (int it = 0; it < 100 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tr_at(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fipo
