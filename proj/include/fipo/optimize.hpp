#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fipo/lp.hpp"
#include "fipo/rating.hpp"
#include "fipo/risk.hpp"
#include "fipo/scenario.hpp"
#include "fipo/sleeve.hpp"

namespace fipo {

/// Sector caps and rating limits of the universe-level constraint set.
struct ConstraintCaps {
  double high_yield = 0.60;
  double emerging = 0.15;
  double structured = 0.10;
  double financial = 0.20;
  std::optional<Rating> avg_rating = Rating::parse("BB");
  std::optional<double> warf_cap;  // off unless set
};

struct UserRow {
  std::string label;
  std::vector<double> coeffs;  // per sleeve, universe order
  double rhs = 0.0;
};

struct ConstraintSet {
  std::vector<LinearProgram::Row> rows;
};

/// Linear rows common to every formulation: budget, sector caps, the
/// average-rating row, the optional WARF row and any user-supplied rows
/// (the regulatory-capital hook).
///
/// The average rating is cash-inclusive with cash scored as AAA, so the cap
/// stays well defined when the book is not fully invested:
///   sum u_j (score_j - score_AAA) <= score_cap - score_AAA.
/// The WARF cap is per invested weight:  sum u_j (warf_j - cap) <= 0.
inline ConstraintSet build_constraints(const std::vector<Sleeve>& universe,
                                       const ConstraintCaps& caps,
                                       const std::vector<UserRow>& user = {}) {
  const size_t n = universe.size();
  ConstraintSet cs;

  std::vector<double> ones(n, 1.0);
  cs.rows.push_back({"budget", ones, 1.0});

  auto sector_row = [&](const std::string& label, auto member, double cap) {
    std::vector<double> c(n, 0.0);
    bool any = false;
    for (size_t j = 0; j < n; ++j)
      if (universe[j].*member) {
        c[j] = 1.0;
        any = true;
      }
    if (any) cs.rows.push_back({label, std::move(c), cap});
  };
  sector_row("cap:high_yield", &Sleeve::high_yield, caps.high_yield);
  sector_row("cap:emerging", &Sleeve::emerging, caps.emerging);
  sector_row("cap:structured", &Sleeve::structured, caps.structured);
  sector_row("cap:financial", &Sleeve::financial, caps.financial);

  if (caps.avg_rating) {
    const double best = Rating(0).linear_score();
    std::vector<double> c(n, 0.0);
    for (size_t j = 0; j < n; ++j)
      c[j] = universe[j].rating.linear_score() - best;
    cs.rows.push_back({"avg_rating", std::move(c), caps.avg_rating->linear_score() - best});
  }
  if (caps.warf_cap) {
    std::vector<double> c(n, 0.0);
    for (size_t j = 0; j < n; ++j) c[j] = universe[j].rating.warf() - *caps.warf_cap;
    cs.rows.push_back({"warf", std::move(c), 0.0});
  }
  for (const auto& row : user) {
    if (row.coeffs.size() != n)
      throw std::invalid_argument("build_constraints: user row size mismatch in " + row.label);
    cs.rows.push_back({"user:" + row.label, row.coeffs, row.rhs});
  }
  return cs;
}

/// Long-only program over the universe: variables u_j in [0, u_bar_j].
inline LinearProgram base_program(const std::vector<Sleeve>& universe,
                                  const std::vector<double>& expected_return,
                                  const ConstraintSet& constraints) {
  if (expected_return.size() != universe.size())
    throw std::invalid_argument("base_program: ER vector size mismatch");
  LinearProgram lp;
  for (size_t j = 0; j < universe.size(); ++j)
    lp.add_variable(universe[j].name, 0.0, universe[j].max_weight, expected_return[j]);
  for (const auto& r : constraints.rows) lp.add_row(r.label, r.coeffs, r.rhs);
  return lp;
}

/// Per-scenario sleeve returns Delta X_j(omega_i), one row per scenario.
inline std::vector<std::vector<double>> scenario_returns(
    const std::vector<Sleeve>& universe, const std::vector<ScenarioSpec>& scenarios) {
  std::vector<std::vector<double>> dx(scenarios.size());
  for (size_t i = 0; i < scenarios.size(); ++i) {
    scenarios[i].validate();
    dx[i].resize(universe.size());
    for (size_t j = 0; j < universe.size(); ++j)
      dx[i][j] = apply_scenario(universe[j], scenarios[i]);
  }
  return dx;
}

/// Maximise ER subject to scenario loss floors
///   sum_j u_j Delta X_j(omega_i) >= -epsilon_i
/// plus the constraint set and allocation bounds.
inline LpSolution maximize_er(const std::vector<Sleeve>& universe,
                              const std::vector<double>& expected_return,
                              const std::vector<ScenarioSpec>& scenarios,
                              const ConstraintSet& constraints) {
  LinearProgram lp = base_program(universe, expected_return, constraints);
  const auto dx = scenario_returns(universe, scenarios);
  for (size_t i = 0; i < scenarios.size(); ++i) {
    std::vector<double> c(universe.size());
    for (size_t j = 0; j < universe.size(); ++j) c[j] = -dx[i][j];
    lp.add_row("scenario:" + scenarios[i].label, std::move(c), scenarios[i].loss_floor);
  }
  return solve(lp);
}

/// Index tracking with a view: floors apply to the relative return
///   sum_j u_j Delta X_j(omega_i) - Delta Y(omega_i) >= -epsilon_i.
inline LpSolution track_index_with_view(const std::vector<Sleeve>& universe,
                                        const std::vector<double>& expected_return,
                                        const std::vector<ScenarioSpec>& scenarios,
                                        const std::vector<double>& index_returns,
                                        const ConstraintSet& constraints) {
  if (index_returns.size() != scenarios.size())
    throw std::invalid_argument("track_index_with_view: index returns size mismatch");
  LinearProgram lp = base_program(universe, expected_return, constraints);
  const auto dx = scenario_returns(universe, scenarios);
  for (size_t i = 0; i < scenarios.size(); ++i) {
    std::vector<double> c(universe.size());
    for (size_t j = 0; j < universe.size(); ++j) c[j] = -dx[i][j];
    lp.add_row("scenario:" + scenarios[i].label, std::move(c),
               scenarios[i].loss_floor - index_returns[i]);
  }
  return solve(lp);
}

struct MinimaxResult {
  LpSolution solution;           // weights exclude the slack variable
  double worst_slack = 0.0;      // optimal u_0
  bool tracking_feasible = true; // u_0 <= 0: tracking error within tolerance
};

/// Minimax tracking: minimise the slack u_0 with
///   u_0 + sum_j u_j Delta X_j(omega_i) - Delta Y(omega_i) + epsilon_i >= 0.
/// A positive optimal u_0 means the tracking error cannot be brought within
/// the scenario tolerances.
inline MinimaxResult track_index_minimax(const std::vector<Sleeve>& universe,
                                         const std::vector<ScenarioSpec>& scenarios,
                                         const std::vector<double>& index_returns,
                                         const ConstraintSet& constraints) {
  if (index_returns.size() != scenarios.size())
    throw std::invalid_argument("track_index_minimax: index returns size mismatch");
  const size_t n = universe.size();
  LinearProgram lp;
  lp.add_variable("u0", -LinearProgram::kInf, LinearProgram::kInf, -1.0);
  for (size_t j = 0; j < n; ++j)
    lp.add_variable(universe[j].name, 0.0, universe[j].max_weight, 0.0);
  for (const auto& r : constraints.rows) {
    std::vector<double> c(n + 1, 0.0);
    for (size_t j = 0; j < n; ++j) c[j + 1] = r.coeffs[j];
    lp.add_row(r.label, std::move(c), r.rhs);
  }
  const auto dx = scenario_returns(universe, scenarios);
  for (size_t i = 0; i < scenarios.size(); ++i) {
    std::vector<double> c(n + 1, 0.0);
    c[0] = -1.0;
    for (size_t j = 0; j < n; ++j) c[j + 1] = -dx[i][j];
    lp.add_row("scenario:" + scenarios[i].label, std::move(c),
               scenarios[i].loss_floor - index_returns[i]);
  }
  MinimaxResult out;
  LpSolution sol = solve(lp);
  out.worst_slack = sol.weights.empty() ? 0.0 : sol.weights[0];
  out.tracking_feasible = out.worst_slack <= 1e-9;
  if (!sol.weights.empty()) sol.weights.erase(sol.weights.begin());
  sol.objective = -sol.objective;  // report min u_0
  out.solution = std::move(sol);
  return out;
}

/// A convex risk with an evaluable gradient and an upper limit.
struct ConvexRisk {
  std::string label;
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  double limit = 0.0;
};

struct CuttingPlaneState {
  std::vector<double> iterate;
  std::vector<double> risk_values;       // per ConvexRisk at the final iterate
  std::vector<double> objectives;        // LP value per iteration
  int iterations = 0;
  int cuts_added = 0;
  bool converged = true;
  double max_gap = 0.0;                  // worst R(u*) - limit on exit
};

struct CutSolveResult {
  LpSolution solution;
  CuttingPlaneState state;
};

/// Iterated LP for convex risk limits. Each round solves the LP, evaluates
/// every risk at the iterate u*, and for each violated limit adds the tangent
/// cut (with the limit tightened by eps_cut so the loop terminates):
///   u . grad R(u*) <= (limit - eps_cut) - R(u*) + u* . grad R(u*).
/// Cuts accumulate across iterations. Stops once every risk is within its
/// limit or max_iter is reached.
inline CutSolveResult cutting_plane_solve(LinearProgram lp,
                                          const std::vector<ConvexRisk>& risks,
                                          double eps_cut = 1e-6, int max_iter = 50) {
  CutSolveResult out;
  for (int it = 0; it < max_iter; ++it) {
    out.solution = solve(lp);
    out.state.iterations = it + 1;
    if (out.solution.status != LpStatus::Optimal) {
      out.state.converged = false;
      return out;
    }
    out.state.objectives.push_back(out.solution.objective);
    out.state.iterate = out.solution.weights;

    out.state.risk_values.clear();
    double worst_gap = 0.0;
    std::vector<size_t> violated;
    for (size_t k = 0; k < risks.size(); ++k) {
      const double r = risks[k].value(out.solution.weights);
      out.state.risk_values.push_back(r);
      const double gap = r - risks[k].limit;
      if (gap > worst_gap) worst_gap = gap;
      if (!(r <= risks[k].limit + 1e-12)) violated.push_back(k);
    }
    out.state.max_gap = worst_gap;
    if (violated.empty()) {
      out.state.converged = true;
      return out;
    }
    for (size_t k : violated) {
      const auto& risk = risks[k];
      const std::vector<double> g = risk.gradient(out.solution.weights);
      const double r_star = out.state.risk_values[k];
      double anchor = 0.0;
      for (size_t j = 0; j < g.size(); ++j) anchor += out.solution.weights[j] * g[j];
      std::vector<double> coeffs(lp.num_vars(), 0.0);
      for (size_t j = 0; j < g.size(); ++j) coeffs[j] = g[j];
      lp.add_row("cut:" + risk.label + ":" + std::to_string(out.state.cuts_added),
                 std::move(coeffs), (risk.limit - eps_cut) - r_star + anchor);
      ++out.state.cuts_added;
    }
  }
  out.state.converged = false;
  return out;
}

}  // namespace fipo
