#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fipo/scenario.hpp"
#include "fipo/sleeve.hpp"

namespace fipo {

/// Parameters of the total risk function R1 v R2 v R3 v 2 R4:
///   R1  loss from the riskfree rate +2%
///   R2  loss from credit spreads doubling (CSx2)
///   R3  stress losses (CSL)
///   R4  annual portfolio stdev
struct RiskConfig {
  double sigma_y = 0.009;      // annual yield volatility
  double sigma_spread = 0.35;  // annual relative credit spread volatility
  double rho = 0.8;            // inter-sleeve credit correlation
  double dt_years = 1.0;       // stdev horizon
  std::array<double, 4> alpha = {1.0, 1.0, 1.0, 2.0};
  double rate_shock = 0.02;
  double spread_multiplier = 2.0;
  bool use_stdev = true;       // drop the alpha_4 R4 term when false

  void validate() const {
    if (!(sigma_y > 0.0) || !(sigma_spread > 0.0))
      throw std::invalid_argument("RiskConfig: volatilities must be > 0");
    if (rho < 0.0 || rho > 1.0)
      throw std::invalid_argument("RiskConfig: rho must be in [0,1]");
    if (!(dt_years > 0.0))
      throw std::invalid_argument("RiskConfig: dt must be > 0");
    for (double a : alpha)
      if (!(a > 0.0)) throw std::invalid_argument("RiskConfig: alpha weights must be > 0");
  }
};

enum class RiskMeasure { RateShock, SpreadDoubling, StressLoss, Stdev };

inline const char* risk_measure_name(RiskMeasure m) {
  switch (m) {
    case RiskMeasure::RateShock: return "rate_shock";
    case RiskMeasure::SpreadDoubling: return "csx2";
    case RiskMeasure::StressLoss: return "csl";
    case RiskMeasure::Stdev: return "stdev";
  }
  return "?";
}

/// Per-sleeve loss (fraction of NAV per unit weight) under one of the three
/// scenario measures. Signed: a sleeve trading above its stress level shows a
/// stress gain.
inline double sleeve_scenario_loss(const Sleeve& s, RiskMeasure m, const RiskConfig& cfg) {
  switch (m) {
    case RiskMeasure::RateShock: {
      ScenarioSpec spec;
      spec.label = "rate_shock";
      spec.rate_bump = cfg.rate_shock;
      return -apply_scenario(s, spec);
    }
    case RiskMeasure::SpreadDoubling: {
      ScenarioSpec spec;
      spec.label = "csx2";
      spec.spread_multiplier = cfg.spread_multiplier;
      return -apply_scenario(s, spec);
    }
    case RiskMeasure::StressLoss: {
      ScenarioSpec spec;
      spec.label = "csl";
      spec.stress = true;
      return -apply_scenario(s, spec);
    }
    default:
      throw std::invalid_argument("sleeve_scenario_loss: not a scenario measure");
  }
}

inline double scenario_measure(std::span<const double> weights,
                               const std::vector<Sleeve>& sleeves, RiskMeasure m,
                               const RiskConfig& cfg) {
  if (weights.size() != sleeves.size())
    throw std::invalid_argument("scenario_measure: weight/sleeve size mismatch");
  double loss = 0.0;
  for (size_t j = 0; j < sleeves.size(); ++j)
    loss += weights[j] * sleeve_scenario_loss(sleeves[j], m, cfg);
  return loss;
}

/// Portfolio variance over dt:
///   Sigma^2 = { (sum u D^ir)^2 sigma_y^2
///             + rho (sum u D^cr s)^2 sigma_c^2
///             + (1-rho) sum u^2 (D^cr s)^2 sigma_c^2 } dt
inline double portfolio_variance(std::span<const double> weights,
                                 const std::vector<Sleeve>& sleeves,
                                 const RiskConfig& cfg) {
  double ir = 0.0, cr = 0.0, idio = 0.0;
  for (size_t j = 0; j < sleeves.size(); ++j) {
    const double u = weights[j];
    ir += u * sleeves[j].dur_ir;
    const double ds = sleeves[j].dur_cr * sleeves[j].spread;
    cr += u * ds;
    idio += u * u * ds * ds;
  }
  const double s2 = cfg.sigma_spread * cfg.sigma_spread;
  return (ir * ir * cfg.sigma_y * cfg.sigma_y + cfg.rho * cr * cr * s2 +
          (1.0 - cfg.rho) * idio * s2) *
         cfg.dt_years;
}

inline double portfolio_stdev(std::span<const double> weights,
                              const std::vector<Sleeve>& sleeves,
                              const RiskConfig& cfg) {
  return std::sqrt(portfolio_variance(weights, sleeves, cfg));
}

/// Gradient of portfolio_stdev; the zero vector at the origin (any
/// subgradient works there, and cuts are only taken at nonzero iterates).
inline std::vector<double> portfolio_stdev_gradient(std::span<const double> weights,
                                                    const std::vector<Sleeve>& sleeves,
                                                    const RiskConfig& cfg) {
  std::vector<double> grad(sleeves.size(), 0.0);
  const double sigma = portfolio_stdev(weights, sleeves, cfg);
  if (sigma < 1e-14) return grad;
  double ir = 0.0, cr = 0.0;
  for (size_t j = 0; j < sleeves.size(); ++j) {
    ir += weights[j] * sleeves[j].dur_ir;
    cr += weights[j] * sleeves[j].dur_cr * sleeves[j].spread;
  }
  const double s2 = cfg.sigma_spread * cfg.sigma_spread;
  for (size_t j = 0; j < sleeves.size(); ++j) {
    const double ds = sleeves[j].dur_cr * sleeves[j].spread;
    const double dvar = 2.0 *
                        (ir * sleeves[j].dur_ir * cfg.sigma_y * cfg.sigma_y +
                         cfg.rho * cr * ds * s2 +
                         (1.0 - cfg.rho) * weights[j] * ds * ds * s2) *
                        cfg.dt_years;
    grad[j] = dvar / (2.0 * sigma);
  }
  return grad;
}

struct TotalRisk {
  double value = 0.0;
  RiskMeasure binding = RiskMeasure::RateShock;
  std::array<double, 4> weighted = {0.0, 0.0, 0.0, 0.0};  // alpha_k R_k
};

/// Max-combination alpha_1 R1 v alpha_2 R2 v alpha_3 R3 v alpha_4 R4.
inline TotalRisk total_risk(std::span<const double> weights,
                            const std::vector<Sleeve>& sleeves, const RiskConfig& cfg) {
  TotalRisk out;
  out.weighted[0] =
      cfg.alpha[0] * scenario_measure(weights, sleeves, RiskMeasure::RateShock, cfg);
  out.weighted[1] =
      cfg.alpha[1] * scenario_measure(weights, sleeves, RiskMeasure::SpreadDoubling, cfg);
  out.weighted[2] =
      cfg.alpha[2] * scenario_measure(weights, sleeves, RiskMeasure::StressLoss, cfg);
  out.weighted[3] =
      cfg.use_stdev ? cfg.alpha[3] * portfolio_stdev(weights, sleeves, cfg) : 0.0;
  const int n = cfg.use_stdev ? 4 : 3;
  int best = 0;
  for (int k = 1; k < n; ++k)
    if (out.weighted[k] > out.weighted[best]) best = k;
  out.value = out.weighted[best];
  out.binding = static_cast<RiskMeasure>(best);
  return out;
}

}  // namespace fipo
