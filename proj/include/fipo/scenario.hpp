#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fipo/bond.hpp"
#include "fipo/sleeve.hpp"

namespace fipo {

inline constexpr double kQuantile95 = 1.959963984540054;
inline constexpr double kQuantile99 = 2.5758293035489004;

/// Derives an independent per-stream seed from (seed, stream), splitmix64
/// style. Simulation paths draw from their own substream so that path i is
/// the same regardless of how many paths are requested.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Curve move that is affine in maturity: short_bump at T=0, long_bump at
/// T = 2*pivot. A symmetric steepener (-x, +x) therefore crosses zero at the
/// pivot maturity.
struct SteepenSpec {
  double short_bump = 0.0;
  double long_bump = 0.0;
  double pivot_maturity = 5.0;

  double bump_at(double maturity) const {
    return short_bump + (long_bump - short_bump) * maturity / (2.0 * pivot_maturity);
  }
};

/// A labelled market shock. Exactly one of {rate move, spread multiplier != 1,
/// stress} may be active; the risk function combines pure scenarios.
struct ScenarioSpec {
  std::string label;
  double rate_bump = 0.0;                 // parallel, added to all yields
  std::optional<SteepenSpec> steepen;     // alternative to rate_bump
  double spread_multiplier = 1.0;         // applied to credit spreads
  bool stress = false;                    // CSL at the sleeve's z*
  double loss_floor = 0.0;                // epsilon_i, worst acceptable loss

  bool has_rate_move() const { return rate_bump != 0.0 || steepen.has_value(); }

  double rate_bump_at(double maturity) const {
    return steepen ? steepen->bump_at(maturity) : rate_bump;
  }

  void validate() const {
    if (!(spread_multiplier > 0.0))
      throw std::invalid_argument("ScenarioSpec " + label + ": spread multiplier must be > 0");
    if (loss_floor < 0.0)
      throw std::invalid_argument("ScenarioSpec " + label + ": loss floor must be >= 0");
    if (steepen && rate_bump != 0.0)
      throw std::invalid_argument("ScenarioSpec " + label + ": parallel and steepen both set");
    int active = (has_rate_move() ? 1 : 0) + (spread_multiplier != 1.0 ? 1 : 0) +
                 (stress ? 1 : 0);
    if (active > 1)
      throw std::invalid_argument("ScenarioSpec " + label + ": combine at most one shock kind");
  }
};

/// Return of a sleeve in a scenario, Delta X_j(omega_i), by full repricing.
/// Floating sleeves ignore rate bumps but not spread moves. Stress scenarios
/// return -CSL with y* = riskfree + z*.
inline double apply_scenario(const Sleeve& sleeve, const ScenarioSpec& spec) {
  if (spec.stress) {
    if (sleeve.spread <= 0.0 && sleeve.stress_spread <= 0.0) return 0.0;
    const double y_star = sleeve.riskfree_yield() + sleeve.stress_spread;
    return -stress_loss(sleeve.maturity, sleeve.yield, sleeve.frequency, y_star);
  }
  const double bump = sleeve.floating ? 0.0 : spec.rate_bump_at(sleeve.maturity);
  const double shocked =
      sleeve.yield + bump + sleeve.spread * (spec.spread_multiplier - 1.0);
  const double p0 =
      price_bullet(sleeve.maturity, sleeve.coupon, sleeve.frequency, sleeve.yield);
  const double p1 =
      price_bullet(sleeve.maturity, sleeve.coupon, sleeve.frequency, shocked);
  return p1 / p0 - 1.0;
}

struct RateModelParams {
  double sigma_y = 0.009;  // annual absolute yield volatility
  double kappa = 0.0;      // mean-reversion rate per annum
  double sigma_hat = 0.35; // annual relative spread volatility

  void validate() const {
    if (!(sigma_y > 0.0)) throw std::invalid_argument("RateModelParams: sigma_y must be > 0");
    if (kappa < 0.0) throw std::invalid_argument("RateModelParams: kappa must be >= 0");
    if (!(sigma_hat > 0.0)) throw std::invalid_argument("RateModelParams: sigma_hat must be > 0");
  }
};

/// Euler paths of dr = (theta(t) - kappa r) dt + sigma_y dW. Deterministic
/// under (seed, path index); returns n_paths rows of steps+1 points.
inline std::vector<std::vector<double>> simulate_short_rate(
    const RateModelParams& params, const std::function<double(double)>& theta,
    double r0, double horizon_years, int steps, int n_paths, std::uint64_t seed) {
  if (steps < 1 || n_paths < 1 || !(horizon_years > 0.0))
    throw std::invalid_argument("simulate_short_rate: invalid horizon/steps/paths");
  const double dt = horizon_years / steps;
  const double vol_step = params.sigma_y * std::sqrt(dt);
  std::vector<std::vector<double>> paths(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    std::mt19937_64 gen(substream_seed(seed, static_cast<std::uint64_t>(p)));
    std::normal_distribution<double> normal(0.0, 1.0);
    auto& path = paths[p];
    path.resize(steps + 1);
    path[0] = r0;
    double r = r0;
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      r += (theta(t) - params.kappa * r) * dt + vol_step * normal(gen);
      path[k + 1] = r;
    }
  }
  return paths;
}

struct MomentStats {
  double mean_abs = 0.0;
  double mean_sq = 0.0;
  double mean_quartic = 0.0;
  double band95_lo = 0.0, band95_hi = 0.0;
  double band99_lo = 0.0, band99_hi = 0.0;
};

/// Moments and confidence bands of a centred Normal move over `horizon_days`
/// with annual volatility sigma_y (fraction). Results in percentage points,
/// the market convention for absolute yield-move tables.
inline MomentStats table_stats_normal(double sigma_y, double horizon_days,
                                      double business_days_per_year = 260.0) {
  if (sigma_y < 0.0) throw std::invalid_argument("table_stats_normal: sigma_y must be >= 0");
  const double sigma = 100.0 * sigma_y * std::sqrt(horizon_days / business_days_per_year);
  MomentStats s;
  s.mean_abs = sigma * std::sqrt(2.0 / M_PI);
  s.mean_sq = sigma * sigma;
  s.mean_quartic = 3.0 * sigma * sigma * sigma * sigma;
  s.band95_lo = -kQuantile95 * sigma;
  s.band95_hi = kQuantile95 * sigma;
  s.band99_lo = -kQuantile99 * sigma;
  s.band99_hi = kQuantile99 * sigma;
  return s;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Moments and bands of the relative move Delta x / x = e^{sigma Z} - 1 with
/// sigma = sigma_hat sqrt(h/Y) and zero log-drift (the convention that
/// matches quoted lognormal spread-move bands). Closed forms by default; a
/// Monte Carlo estimate of the moments when n_mc > 0.
inline MomentStats table_stats_lognormal(double sigma_hat, double horizon_days,
                                         double business_days_per_year = 260.0,
                                         long n_mc = 0, std::uint64_t seed = 0) {
  if (sigma_hat < 0.0)
    throw std::invalid_argument("table_stats_lognormal: sigma_hat must be >= 0");
  const double sigma = sigma_hat * std::sqrt(horizon_days / business_days_per_year);
  MomentStats s;
  s.band95_lo = std::expm1(-kQuantile95 * sigma);
  s.band95_hi = std::expm1(kQuantile95 * sigma);
  s.band99_lo = std::expm1(-kQuantile99 * sigma);
  s.band99_hi = std::expm1(kQuantile99 * sigma);
  if (n_mc > 0) {
    std::mt19937_64 gen(substream_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    double a = 0.0, q = 0.0, f = 0.0;
    for (long i = 0; i < n_mc; ++i) {
      const double x = std::expm1(sigma * normal(gen));
      a += std::fabs(x);
      q += x * x;
      f += x * x * x * x;
    }
    s.mean_abs = a / n_mc;
    s.mean_sq = q / n_mc;
    s.mean_quartic = f / n_mc;
    return s;
  }
  // E[e^{k sigma Z}] = e^{k^2 sigma^2 / 2}
  auto mgf = [&](double k) { return std::exp(0.5 * k * k * sigma * sigma); };
  s.mean_abs = mgf(1.0) * (1.0 - 2.0 * normal_cdf(-sigma));
  s.mean_sq = mgf(2.0) - 2.0 * mgf(1.0) + 1.0;
  s.mean_quartic = mgf(4.0) - 4.0 * mgf(3.0) + 6.0 * mgf(2.0) - 4.0 * mgf(1.0) + 1.0;
  return s;
}

}  // namespace fipo
