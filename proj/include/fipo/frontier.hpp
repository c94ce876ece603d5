#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fipo/optimize.hpp"
#include "fipo/risk.hpp"

namespace fipo {

struct FrontierPoint {
  double risk_limit = 0.0;  // R-bar, fraction of NAV
  double er = 0.0;          // achieved excess expected return
  std::string binding;      // which risk measure or row binds at the optimum
};

/// Log-spaced risk-limit grid, by default 20 points on [0.005, 0.40] of NAV.
inline std::vector<double> make_risk_grid(double lo = 0.005, double hi = 0.40,
                                          int n = 20, bool log_spaced = true) {
  if (n < 1 || !(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("make_risk_grid: need 0 < lo < hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i) {
    const double w = static_cast<double>(i) / (n - 1);
    g[i] = log_spaced ? lo * std::pow(hi / lo, w) : lo + w * (hi - lo);
  }
  return g;
}

/// Maximum ER at one total-risk limit. The max-combination R1 v R2 v R3 v
/// alpha4 R4 <= R-bar decomposes into per-measure limits R_k <= R-bar/alpha_k:
/// the scenario measures enter as linear rows, the stdev through cutting
/// planes.
inline FrontierPoint solve_at_risk_limit(const std::vector<Sleeve>& universe,
                                         const std::vector<double>& expected_return,
                                         const ConstraintSet& constraints,
                                         const RiskConfig& cfg, double risk_limit) {
  if (risk_limit < 0.0)
    throw std::invalid_argument("solve_at_risk_limit: risk limit must be >= 0");
  LinearProgram lp = base_program(universe, expected_return, constraints);
  const size_t n = universe.size();

  const std::array<RiskMeasure, 3> linear_measures = {
      RiskMeasure::RateShock, RiskMeasure::SpreadDoubling, RiskMeasure::StressLoss};
  for (int k = 0; k < 3; ++k) {
    std::vector<double> c(n, 0.0);
    for (size_t j = 0; j < n; ++j)
      c[j] = sleeve_scenario_loss(universe[j], linear_measures[k], cfg);
    lp.add_row(std::string("risk:") + risk_measure_name(linear_measures[k]),
               std::move(c), risk_limit / cfg.alpha[k]);
  }

  std::vector<ConvexRisk> risks;
  if (cfg.use_stdev) {
    ConvexRisk stdev;
    stdev.label = "stdev";
    stdev.limit = risk_limit / cfg.alpha[3];
    stdev.value = [&universe, cfg](std::span<const double> u) {
      return portfolio_stdev(u, universe, cfg);
    };
    stdev.gradient = [&universe, cfg](std::span<const double> u) {
      return portfolio_stdev_gradient(u, universe, cfg);
    };
    risks.push_back(std::move(stdev));
  }

  CutSolveResult res = cutting_plane_solve(lp, risks);
  if (res.solution.status != LpStatus::Optimal)
    throw std::runtime_error("solve_at_risk_limit: solver returned " +
                             std::string(lp_status_name(res.solution.status)));

  FrontierPoint pt;
  pt.risk_limit = risk_limit;
  pt.er = res.solution.objective;

  // label the binding risk measure, falling back to a tight structural row
  const TotalRisk tr = total_risk(res.solution.weights, universe, cfg);
  if (tr.value >= risk_limit - std::max(1e-6, 1e-6 * risk_limit)) {
    pt.binding = risk_measure_name(tr.binding);
  } else {
    pt.binding = "allocation";
    for (const auto& label : res.solution.binding) {
      if (label.rfind("cut:", 0) == 0 || label.rfind("risk:", 0) == 0) continue;
      pt.binding = label;
      break;
    }
  }
  return pt;
}

/// Trace the efficient frontier over an increasing risk-limit grid.
inline std::vector<FrontierPoint> sweep_frontier(
    const std::vector<Sleeve>& universe, const std::vector<double>& expected_return,
    const ConstraintSet& constraints, const RiskConfig& cfg,
    const std::vector<double>& grid) {
  for (size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 0.0 || (i > 0 && grid[i] <= grid[i - 1]))
      throw std::invalid_argument("sweep_frontier: grid must be increasing and >= 0");
  std::vector<FrontierPoint> points;
  points.reserve(grid.size());
  for (double r : grid)
    points.push_back(
        solve_at_risk_limit(universe, expected_return, constraints, cfg, r));
  return points;
}

struct FrontierFit {
  double a = 0.0;      // ER asymptote of r = a (1 - e^{-R/b})
  double b = 0.0;      // risk scale; a/b is the gradient at the origin
  double rmse = 0.0;
  std::string date;
};

inline double frontier_model(double a, double b, double risk) {
  return a * (1.0 - std::exp(-risk / b));
}

/// Least-squares fit of r = a (1 - e^{-R/b}). A log-spaced scan over b (with
/// the conditionally-optimal a in closed form) seeds a Gauss-Newton
/// refinement with step halving; converged when the SSE gradient is below
/// 1e-10.
inline FrontierFit fit_frontier(const std::vector<FrontierPoint>& points) {
  const size_t n = points.size();
  if (n < 3)
    throw std::invalid_argument("fit_frontier: need at least 3 points");
  double r_max = 0.0, risk_max = 0.0, risk_min = LinearProgram::kInf;
  for (const auto& p : points) {
    r_max = std::max(r_max, p.er);
    risk_max = std::max(risk_max, p.risk_limit);
    if (p.risk_limit > 0.0) risk_min = std::min(risk_min, p.risk_limit);
  }
  if (!(r_max > 0.0))
    throw std::invalid_argument("fit_frontier: degenerate data, all returns zero");
  if (!std::isfinite(risk_min)) risk_min = risk_max;

  auto sse_for = [&](double a, double b) {
    double s = 0.0;
    for (const auto& p : points) {
      const double e = frontier_model(a, b, p.risk_limit) - p.er;
      s += e * e;
    }
    return s;
  };
  auto best_a_for = [&](double b) {
    double num = 0.0, den = 0.0;
    for (const auto& p : points) {
      const double g = 1.0 - std::exp(-p.risk_limit / b);
      num += p.er * g;
      den += g * g;
    }
    return den > 0.0 ? num / den : 0.0;
  };

  // grid seed
  double a = r_max, b = risk_max, best_sse = LinearProgram::kInf;
  const double b_lo = risk_min / 20.0, b_hi = risk_max * 20.0;
  for (int k = 0; k < 80; ++k) {
    const double bb = b_lo * std::pow(b_hi / b_lo, k / 79.0);
    const double aa = best_a_for(bb);
    if (!(aa > 0.0)) continue;
    const double s = sse_for(aa, bb);
    if (s < best_sse) {
      best_sse = s;
      a = aa;
      b = bb;
    }
  }

  // Gauss-Newton with backtracking
  for (int it = 0; it < 200; ++it) {
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jte0 = 0.0, jte1 = 0.0;
    for (const auto& p : points) {
      const double ex = std::exp(-p.risk_limit / b);
      const double ja = 1.0 - ex;
      const double jb = -a * ex * p.risk_limit / (b * b);
      const double e = a * ja - p.er;
      jtj00 += ja * ja;
      jtj01 += ja * jb;
      jtj11 += jb * jb;
      jte0 += ja * e;
      jte1 += jb * e;
    }
    if (std::max(std::fabs(jte0), std::fabs(jte1)) < 1e-10) break;
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    double da, db;
    if (std::fabs(det) < 1e-300) {
      da = -jte0 / (jtj00 + 1e-12);  // gradient step if J is rank deficient
      db = -jte1 / (jtj11 + 1e-12);
    } else {
      da = (-jte0 * jtj11 + jte1 * jtj01) / det;
      db = (-jtj00 * jte1 + jtj01 * jte0) / det;
    }
    double step = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half, step *= 0.5) {
      const double a2 = a + step * da, b2 = b + step * db;
      if (!(a2 > 0.0) || !(b2 > 0.0)) continue;
      if (sse_for(a2, b2) <= best_sse + 1e-18) {
        best_sse = sse_for(a2, b2);
        a = a2;
        b = b2;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  FrontierFit fit;
  fit.a = a;
  fit.b = b;
  fit.rmse = std::sqrt(sse_for(a, b) / n);
  return fit;
}

struct FactorSeries {
  std::vector<std::string> dates;
  std::vector<double> a, b;
  double p = 0.0;             // slope of ln b on ln a
  std::vector<double> b_star; // b / a^p
  double residual_corr = 0.0; // sample cov of (ln a, ln b*), ~0 by OLS
};

/// Split (a_t, b_t) into independent factors a*_t = a_t and b*_t = b_t/a_t^p,
/// with p the OLS slope of ln b_t on ln a_t.
inline FactorSeries factorize_series(const std::vector<std::string>& dates,
                                     const std::vector<double>& a,
                                     const std::vector<double>& b) {
  const size_t n = a.size();
  if (n < 3 || b.size() != n || (!dates.empty() && dates.size() != n))
    throw std::invalid_argument("factorize_series: need >= 3 aligned observations");
  std::vector<double> la(n), lb(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0))
      throw std::invalid_argument("factorize_series: factors must be positive");
    la[i] = std::log(a[i]);
    lb[i] = std::log(b[i]);
  }
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += la[i];
    mb += lb[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sab = 0.0;
  for (size_t i = 0; i < n; ++i) {
    saa += (la[i] - ma) * (la[i] - ma);
    sab += (la[i] - ma) * (lb[i] - mb);
  }
  if (saa < 1e-16)
    throw std::invalid_argument("factorize_series: constant a series, slope undefined");

  FactorSeries out;
  out.dates = dates;
  out.a = a;
  out.b = b;
  out.p = sab / saa;
  out.b_star.resize(n);
  double cov = 0.0, m_bstar = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out.b_star[i] = b[i] / std::pow(a[i], out.p);
    m_bstar += std::log(out.b_star[i]);
  }
  m_bstar /= n;
  for (size_t i = 0; i < n; ++i)
    cov += (la[i] - ma) * (std::log(out.b_star[i]) - m_bstar);
  out.residual_corr = cov / n;
  return out;
}

struct OuFit {
  double k11 = 0.0, k12 = 0.0, k21 = 0.0, k22 = 0.0;  // mean-reversion matrix
  double mean1 = 0.0, mean2 = 0.0;                    // long-run mean
  double phi11 = 0.0, phi12 = 0.0, phi21 = 0.0, phi22 = 0.0;  // VAR(1) matrix
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;  // residual (noise) covariance
  bool mean_reverting = true;
};

/// Fit a bivariate Ornstein-Uhlenbeck model to equally spaced observations by
/// VAR(1) regression x_{t+dt} = Phi x_t + mu + eta, then K = -log(Phi)/dt.
/// A spectral radius >= 1 (or a nonpositive real eigenvalue) is reported as
/// non-mean-reverting rather than inverted.
inline OuFit fit_ou(const std::vector<std::array<double, 2>>& x, double dt) {
  const size_t n = x.size();
  if (n < 10) throw std::invalid_argument("fit_ou: need at least 10 observations");
  if (!(dt > 0.0)) throw std::invalid_argument("fit_ou: dt must be > 0");

  // normal equations for regressors [x1, x2, 1]
  double g[3][3] = {{0}}, rhs1[3] = {0}, rhs2[3] = {0};
  for (size_t i = 0; i + 1 < n; ++i) {
    const double reg[3] = {x[i][0], x[i][1], 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) g[r][c] += reg[r] * reg[c];
      rhs1[r] += reg[r] * x[i + 1][0];
      rhs2[r] += reg[r] * x[i + 1][1];
    }
  }
  // solve the two 3x3 systems by Gaussian elimination with partial pivoting
  double aug[3][5];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) aug[r][c] = g[r][c];
    aug[r][3] = rhs1[r];
    aug[r][4] = rhs2[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
    if (std::fabs(aug[piv][col]) < 1e-12)
      throw std::invalid_argument("fit_ou: degenerate regressors (constant series?)");
    std::swap_ranges(aug[piv], aug[piv] + 5, aug[col]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = aug[r][col] / aug[col][col];
      for (int c = col; c < 5; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  const double b1[3] = {aug[0][3] / aug[0][0], aug[1][3] / aug[1][1], aug[2][3] / aug[2][2]};
  const double b2[3] = {aug[0][4] / aug[0][0], aug[1][4] / aug[1][1], aug[2][4] / aug[2][2]};

  OuFit fit;
  fit.phi11 = b1[0];
  fit.phi12 = b1[1];
  fit.phi21 = b2[0];
  fit.phi22 = b2[1];
  const double mu1 = b1[2], mu2 = b2[2];

  // residual covariance
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    const double e1 = x[i + 1][0] - (fit.phi11 * x[i][0] + fit.phi12 * x[i][1] + mu1);
    const double e2 = x[i + 1][1] - (fit.phi21 * x[i][0] + fit.phi22 * x[i][1] + mu2);
    q11 += e1 * e1;
    q12 += e1 * e2;
    q22 += e2 * e2;
  }
  const double m = static_cast<double>(n - 1);
  fit.q11 = q11 / m;
  fit.q12 = q12 / m;
  fit.q22 = q22 / m;

  // K = -log(Phi)/dt for the 2x2 case
  const double tr = fit.phi11 + fit.phi22;
  const double det = fit.phi11 * fit.phi22 - fit.phi12 * fit.phi21;
  const double disc = tr * tr - 4.0 * det;
  auto log_scaled = [&](double l11, double l12, double l21, double l22) {
    fit.k11 = -l11 / dt;
    fit.k12 = -l12 / dt;
    fit.k21 = -l21 / dt;
    fit.k22 = -l22 / dt;
  };
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double l1 = 0.5 * (tr + root), l2 = 0.5 * (tr - root);
    if (l1 >= 1.0 || l2 <= 0.0) {
      fit.mean_reverting = false;
    } else if (root < 1e-12) {
      // (near-)scalar: log(Phi) = log(mu) I + (Phi - mu I)/mu
      const double mu = 0.5 * tr;
      log_scaled(std::log(mu) + (fit.phi11 - mu) / mu, fit.phi12 / mu,
                 fit.phi21 / mu, std::log(mu) + (fit.phi22 - mu) / mu);
    } else {
      // distinct real eigenvalues: log via the spectral decomposition,
      // log(Phi) = c0 I + c1 Phi with c1 = (log l1 - log l2)/(l1 - l2)
      const double c1 = (std::log(l1) - std::log(l2)) / (l1 - l2);
      const double c0 = std::log(l1) - c1 * l1;
      log_scaled(c0 + c1 * fit.phi11, c1 * fit.phi12, c1 * fit.phi21,
                 c0 + c1 * fit.phi22);
    }
  } else {
    // complex pair mu +- i nu: log(Phi) = log(r) I + (theta/nu)(Phi - mu I)
    const double mu = 0.5 * tr;
    const double nu = 0.5 * std::sqrt(-disc);
    const double radius = std::sqrt(det);
    if (radius >= 1.0) {
      fit.mean_reverting = false;
    } else {
      const double theta = std::atan2(nu, mu);
      const double s = theta / nu;
      log_scaled(std::log(radius) + s * (fit.phi11 - mu), s * fit.phi12,
                 s * fit.phi21, std::log(radius) + s * (fit.phi22 - mu));
    }
  }

  if (fit.mean_reverting) {
    // long-run mean (I - Phi)^{-1} mu
    const double a11 = 1.0 - fit.phi11, a12 = -fit.phi12;
    const double a21 = -fit.phi21, a22 = 1.0 - fit.phi22;
    const double d = a11 * a22 - a12 * a21;
    if (std::fabs(d) < 1e-14) {
      fit.mean_reverting = false;
    } else {
      fit.mean1 = (a22 * mu1 - a12 * mu2) / d;
      fit.mean2 = (-a21 * mu1 + a11 * mu2) / d;
    }
  }
  return fit;
}

}  // namespace fipo
