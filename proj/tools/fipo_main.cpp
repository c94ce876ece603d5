// fipo: fixed income portfolio optimiser
//
// Subcommands: price, risk, er, optimize, frontier, backtest, gen-data.
// All outputs are comma-separated text with a preamble line carrying the
// config hash and seed, so runs are reproducible and diffable.

#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fipo/fipo.hpp"

namespace {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  fipo::RunConfig cfg;
  std::vector<fipo::Sleeve> universe;
  fipo::TransitionMatrix transitions;
  fipo::RatingCurveSet curves;
  std::string out_dir;
  std::uint64_t hash = 0;
};

std::string preamble(const Context& ctx, const std::string& command) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(ctx.hash));
  return " fipo " + command + " config_hash=" + buf +
         " seed=" + std::to_string(ctx.cfg.seed);
}

std::string resolve_near(const std::string& anchor_file, const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.is_absolute() || anchor_file.empty()) return path;
  return (fs::path(anchor_file).parent_path() / p).string();
}

Context load_context(const std::string& config_path, const std::string& universe_path,
                     const std::string& out_dir, std::optional<std::uint64_t> seed,
                     bool no_stdev, const std::string& grid_override,
                     bool need_credit_data) {
  Context ctx;
  if (!config_path.empty()) ctx.cfg = fipo::load_config(config_path);
  if (seed) ctx.cfg.seed = *seed;
  if (no_stdev) ctx.cfg.risk.use_stdev = false;
  if (!grid_override.empty()) {
    // "lo:hi:n"
    const auto a = grid_override.find(':');
    const auto b = grid_override.rfind(':');
    if (a == std::string::npos || b == a)
      throw std::runtime_error("bad --grid, expected lo:hi:n");
    ctx.cfg.grid_lo = std::stod(grid_override.substr(0, a));
    ctx.cfg.grid_hi = std::stod(grid_override.substr(a + 1, b - a - 1));
    ctx.cfg.grid_n = std::stoi(grid_override.substr(b + 1));
  }
  ctx.cfg.risk.validate();
  if (!universe_path.empty()) ctx.universe = fipo::load_universe(universe_path);
  if (need_credit_data) {
    ctx.transitions =
        fipo::load_transitions(resolve_near(config_path, ctx.cfg.transitions_path));
    ctx.curves = fipo::load_rating_curves(resolve_near(config_path, ctx.cfg.curves_path));
  }
  ctx.out_dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(ctx.out_dir);
  ctx.hash = fipo::config_hash(ctx.cfg);
  return ctx;
}

std::string out_path(const Context& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

void cmd_price(const Context& ctx) {
  fipo::csv::Table t;
  t.comments.push_back(preamble(ctx, "price"));
  t.header = {"name", "maturity", "coupon", "frequency", "yield",
              "clean_price", "duration", "convexity"};
  for (const auto& s : ctx.universe) {
    const double p = fipo::price_bullet(s.maturity, s.coupon, s.frequency, s.yield);
    const auto dc = fipo::duration_convexity(s.maturity, s.coupon, s.frequency, s.yield);
    t.rows.push_back({s.name, fipo::csv::format_double(s.maturity),
                      fipo::csv::format_double(s.coupon), std::to_string(s.frequency),
                      fipo::csv::format_double(s.yield), fipo::csv::format_double(p),
                      fipo::csv::format_double(dc.duration),
                      fipo::csv::format_double(dc.convexity)});
  }
  fipo::csv::write_file(out_path(ctx, "price_table.csv"), t);
}

void cmd_risk(const Context& ctx) {
  fipo::csv::Table t;
  t.comments.push_back(preamble(ctx, "risk"));
  t.header = {"name", "rate_shock_loss", "csx2_loss", "csl", "stdev_1y"};
  for (const auto& spec : ctx.cfg.scenarios) t.header.push_back("ret:" + spec.label);
  for (const auto& s : ctx.universe) {
    std::vector<double> w = {1.0};
    const std::vector<fipo::Sleeve> one = {s};
    std::vector<std::string> row = {
        s.name,
        fipo::csv::format_double(fipo::sleeve_scenario_loss(
            s, fipo::RiskMeasure::RateShock, ctx.cfg.risk)),
        fipo::csv::format_double(fipo::sleeve_scenario_loss(
            s, fipo::RiskMeasure::SpreadDoubling, ctx.cfg.risk)),
        fipo::csv::format_double(fipo::sleeve_scenario_loss(
            s, fipo::RiskMeasure::StressLoss, ctx.cfg.risk)),
        fipo::csv::format_double(fipo::portfolio_stdev(w, one, ctx.cfg.risk))};
    for (const auto& spec : ctx.cfg.scenarios)
      row.push_back(fipo::csv::format_double(fipo::apply_scenario(s, spec)));
    t.rows.push_back(std::move(row));
  }
  fipo::csv::write_file(out_path(ctx, "risk_report.csv"), t);
}

void cmd_er(const Context& ctx) {
  fipo::csv::Table t;
  t.comments.push_back(preamble(ctx, "er"));
  t.header = {"name", "carry_rolldown", "migration", "cheapness", "total_er",
              "hurdle_yield"};
  const double front_end = ctx.curves.riskfree_rate(ctx.curves.tenors.front());
  for (size_t j = 0; j < ctx.universe.size(); ++j) {
    const auto& s = ctx.universe[j];
    fipo::RatingCurveSet own =
        s.floating ? ctx.curves.with_flat_riskfree(front_end) : ctx.curves;
    own = own.shifted(s.spread - own.spread(s.rating, s.maturity));
    const double p0 =
        fipo::price_on_rating_curve(s.rating, s.maturity, s.coupon, s.frequency, own);
    const auto tr = fipo::expected_total_return({s.maturity, s.coupon, s.frequency},
                                                s.rating, p0, own, ctx.transitions,
                                                ctx.cfg.horizon_years);
    std::string hurdle;
    try {
      hurdle = fipo::csv::format_double(fipo::hurdle_yield(
          s.rating, s.maturity, s.coupon, s.frequency, own, ctx.transitions,
          ctx.cfg.horizon_years, s.riskfree_yield()));
    } catch (const std::exception&) {
      hurdle = "";  // no breakeven yield inside the search bracket
    }
    t.rows.push_back({s.name, fipo::csv::format_double(tr.carry_rolldown),
                      fipo::csv::format_double(tr.migration),
                      fipo::csv::format_double(tr.cheapness),
                      fipo::csv::format_double(tr.total), hurdle});
  }
  fipo::csv::write_file(out_path(ctx, "er_table.csv"), t);
}

void write_solution(const Context& ctx, const std::string& command,
                    const fipo::LpSolution& sol,
                    std::optional<double> worst_slack = std::nullopt) {
  fipo::csv::Table alloc;
  alloc.comments.push_back(preamble(ctx, command));
  alloc.header = {"name", "weight"};
  double invested = 0.0;
  for (size_t j = 0; j < ctx.universe.size(); ++j) {
    alloc.rows.push_back({ctx.universe[j].name,
                          fipo::csv::format_double(sol.weights[j])});
    invested += sol.weights[j];
  }
  alloc.rows.push_back({"cash", fipo::csv::format_double(1.0 - invested)});
  fipo::csv::write_file(out_path(ctx, "allocation.csv"), alloc);

  fipo::csv::Table sum;
  sum.comments.push_back(preamble(ctx, command));
  sum.header = {"key", "value"};
  sum.rows.push_back({"status", fipo::lp_status_name(sol.status)});
  sum.rows.push_back({"objective", fipo::csv::format_double(sol.objective)});
  sum.rows.push_back({"iterations", std::to_string(sol.iterations)});
  std::string binding;
  for (const auto& b : sol.binding) binding += (binding.empty() ? "" : ";") + b;
  sum.rows.push_back({"binding", binding});
  if (worst_slack) sum.rows.push_back({"u0", fipo::csv::format_double(*worst_slack)});
  if (!sol.infeasible_rows.empty()) {
    std::string rows;
    for (const auto& r : sol.infeasible_rows)
      rows += (rows.empty() ? "" : ";") + r;
    sum.rows.push_back({"violated_at_cash", rows});
  }
  fipo::csv::write_file(out_path(ctx, "solution.csv"), sum);
}

void cmd_optimize(const Context& ctx) {
  const auto er = fipo::sleeve_expected_returns(ctx.universe, ctx.curves,
                                                ctx.transitions, ctx.cfg.horizon_years);
  const auto cs = fipo::build_constraints(ctx.universe, ctx.cfg.caps);

  if (ctx.cfg.problem == "track_minimax") {
    if (ctx.cfg.index_returns.empty())
      throw std::runtime_error("track_minimax needs index_return on every scenario");
    const auto res = fipo::track_index_minimax(ctx.universe, ctx.cfg.scenarios,
                                               ctx.cfg.index_returns, cs);
    if (res.solution.status != fipo::LpStatus::Optimal)
      throw SolverFailure("minimax solve failed: " +
                          std::string(fipo::lp_status_name(res.solution.status)));
    write_solution(ctx, "optimize", res.solution, res.worst_slack);
    return;
  }

  fipo::LpSolution sol;
  if (ctx.cfg.problem == "track_view") {
    if (ctx.cfg.index_returns.empty())
      throw std::runtime_error("track_view needs index_return on every scenario");
    sol = fipo::track_index_with_view(ctx.universe, er, ctx.cfg.scenarios,
                                      ctx.cfg.index_returns, cs);
  } else if (ctx.cfg.problem == "max_er") {
    if (ctx.cfg.risk_limit) {
      // scenario floors plus the total-risk limit via linear rows and cuts
      fipo::LinearProgram lp = fipo::base_program(ctx.universe, er, cs);
      const auto dx = fipo::scenario_returns(ctx.universe, ctx.cfg.scenarios);
      for (size_t i = 0; i < ctx.cfg.scenarios.size(); ++i) {
        std::vector<double> c(ctx.universe.size());
        for (size_t j = 0; j < ctx.universe.size(); ++j) c[j] = -dx[i][j];
        lp.add_row("scenario:" + ctx.cfg.scenarios[i].label, std::move(c),
                   ctx.cfg.scenarios[i].loss_floor);
      }
      const double limit = *ctx.cfg.risk_limit;
      const fipo::RiskMeasure linear[3] = {fipo::RiskMeasure::RateShock,
                                           fipo::RiskMeasure::SpreadDoubling,
                                           fipo::RiskMeasure::StressLoss};
      for (int k = 0; k < 3; ++k) {
        std::vector<double> c(ctx.universe.size());
        for (size_t j = 0; j < ctx.universe.size(); ++j)
          c[j] = fipo::sleeve_scenario_loss(ctx.universe[j], linear[k], ctx.cfg.risk);
        lp.add_row(std::string("risk:") + fipo::risk_measure_name(linear[k]),
                   std::move(c), limit / ctx.cfg.risk.alpha[k]);
      }
      std::vector<fipo::ConvexRisk> risks;
      if (ctx.cfg.risk.use_stdev) {
        fipo::ConvexRisk stdev;
        stdev.label = "stdev";
        stdev.limit = limit / ctx.cfg.risk.alpha[3];
        const auto& universe = ctx.universe;
        const auto risk_cfg = ctx.cfg.risk;
        stdev.value = [&universe, risk_cfg](std::span<const double> u) {
          return fipo::portfolio_stdev(u, universe, risk_cfg);
        };
        stdev.gradient = [&universe, risk_cfg](std::span<const double> u) {
          return fipo::portfolio_stdev_gradient(u, universe, risk_cfg);
        };
        risks.push_back(std::move(stdev));
      }
      const auto res = fipo::cutting_plane_solve(lp, risks);
      if (res.solution.status != fipo::LpStatus::Optimal || !res.state.converged)
        throw SolverFailure("risk-limited solve failed");
      sol = res.solution;
    } else {
      sol = fipo::maximize_er(ctx.universe, er, ctx.cfg.scenarios, cs);
    }
  } else {
    throw std::runtime_error("unknown problem '" + ctx.cfg.problem + "'");
  }
  if (sol.status != fipo::LpStatus::Optimal) {
    write_solution(ctx, "optimize", sol);
    throw SolverFailure("optimize: " + std::string(fipo::lp_status_name(sol.status)));
  }
  write_solution(ctx, "optimize", sol);
}

void write_frontier(const Context& ctx, const std::string& command,
                    const std::vector<fipo::FrontierPoint>& points,
                    const fipo::FrontierFit& fit) {
  fipo::csv::Table pts;
  pts.comments.push_back(preamble(ctx, command));
  pts.header = {"risk_limit", "er", "binding"};
  for (const auto& p : points)
    pts.rows.push_back({fipo::csv::format_double(p.risk_limit),
                        fipo::csv::format_double(p.er), p.binding});
  fipo::csv::write_file(out_path(ctx, "frontier_points.csv"), pts);

  fipo::csv::Table f;
  f.comments.push_back(preamble(ctx, command));
  f.header = {"a", "b", "rmse", "gradient_origin"};
  f.rows.push_back({fipo::csv::format_double(fit.a), fipo::csv::format_double(fit.b),
                    fipo::csv::format_double(fit.rmse),
                    fipo::csv::format_double(fit.a / fit.b)});
  fipo::csv::write_file(out_path(ctx, "frontier_fit.csv"), f);
}

void cmd_frontier(const Context& ctx) {
  const auto er = fipo::sleeve_expected_returns(ctx.universe, ctx.curves,
                                                ctx.transitions, ctx.cfg.horizon_years);
  const auto cs = fipo::build_constraints(ctx.universe, ctx.cfg.caps);
  std::vector<fipo::FrontierPoint> points;
  try {
    points = fipo::sweep_frontier(ctx.universe, er, cs, ctx.cfg.risk, ctx.cfg.grid());
  } catch (const std::runtime_error& e) {
    throw SolverFailure(e.what());
  }
  write_frontier(ctx, "frontier", points, fipo::fit_frontier(points));
}

std::vector<std::string> backtest_dates(const fipo::RunConfig& cfg) {
  std::vector<std::string> dates;
  fipo::Date d = fipo::Date::parse(cfg.backtest_start);
  for (int i = 0; i < cfg.backtest_dates; ++i) {
    dates.push_back(d.iso());
    d = d.plus_months(cfg.backtest_step_months);
  }
  return dates;
}

void cmd_gen_data(const Context& ctx) {
  const auto series = fipo::generate_synthetic_history(
      ctx.cfg.synthetic, ctx.universe, ctx.curves, backtest_dates(ctx.cfg), ctx.cfg.seed);
  fipo::save_market_series(out_path(ctx, "market_series.csv"), series);
}

void cmd_backtest(const Context& ctx, const std::string& series_path) {
  fipo::MarketSeries series;
  if (!series_path.empty()) {
    series = fipo::load_market_series(series_path);
  } else {
    series = fipo::generate_synthetic_history(ctx.cfg.synthetic, ctx.universe,
                                              ctx.curves, backtest_dates(ctx.cfg),
                                              ctx.cfg.seed);
  }
  const auto res =
      fipo::run_backtest(series, ctx.universe, ctx.cfg.caps, ctx.cfg.risk,
                         ctx.cfg.grid(), ctx.transitions, ctx.curves,
                         ctx.cfg.horizon_years);
  if (res.by_date.empty()) throw SolverFailure("backtest: every date failed");

  fipo::csv::Table pts;
  pts.comments.push_back(preamble(ctx, "backtest"));
  pts.header = {"date", "risk_limit", "er", "binding"};
  for (const auto& dr : res.by_date)
    for (const auto& p : dr.points)
      pts.rows.push_back({dr.date, fipo::csv::format_double(p.risk_limit),
                          fipo::csv::format_double(p.er), p.binding});
  fipo::csv::write_file(out_path(ctx, "frontier_points_by_date.csv"), pts);

  fipo::csv::Table fs;
  fs.comments.push_back(preamble(ctx, "backtest"));
  fs.header = {"date", "a", "b", "rmse", "b_star"};
  for (size_t i = 0; i < res.by_date.size(); ++i) {
    const auto& dr = res.by_date[i];
    std::string b_star;
    if (res.factors) {
      for (size_t k = 0; k < res.factors->dates.size(); ++k)
        if (res.factors->dates[k] == dr.date)
          b_star = fipo::csv::format_double(res.factors->b_star[k]);
    }
    fs.rows.push_back({dr.date, fipo::csv::format_double(dr.fit.a),
                       fipo::csv::format_double(dr.fit.b),
                       fipo::csv::format_double(dr.fit.rmse), b_star});
  }
  fipo::csv::write_file(out_path(ctx, "factor_series.csv"), fs);

  fipo::csv::Table ff;
  ff.comments.push_back(preamble(ctx, "backtest"));
  ff.header = {"key", "value"};
  if (res.factors) {
    ff.rows.push_back({"p", fipo::csv::format_double(res.factors->p)});
    ff.rows.push_back(
        {"residual_cov", fipo::csv::format_double(res.factors->residual_corr)});
  }
  if (res.ou) {
    ff.rows.push_back({"ou_mean_reverting", res.ou->mean_reverting ? "1" : "0"});
    ff.rows.push_back({"ou_k11", fipo::csv::format_double(res.ou->k11)});
    ff.rows.push_back({"ou_k12", fipo::csv::format_double(res.ou->k12)});
    ff.rows.push_back({"ou_k21", fipo::csv::format_double(res.ou->k21)});
    ff.rows.push_back({"ou_k22", fipo::csv::format_double(res.ou->k22)});
    ff.rows.push_back({"ou_mean_ln_a", fipo::csv::format_double(res.ou->mean1)});
    ff.rows.push_back({"ou_mean_ln_b", fipo::csv::format_double(res.ou->mean2)});
    ff.rows.push_back({"ou_q11", fipo::csv::format_double(res.ou->q11)});
    ff.rows.push_back({"ou_q12", fipo::csv::format_double(res.ou->q12)});
    ff.rows.push_back({"ou_q22", fipo::csv::format_double(res.ou->q22)});
  }
  fipo::csv::write_file(out_path(ctx, "factor_fit.csv"), ff);

  if (!res.skipped.empty()) {
    fipo::csv::Table sk;
    sk.comments.push_back(preamble(ctx, "backtest"));
    sk.header = {"skipped"};
    for (const auto& s : res.skipped) sk.rows.push_back({s});
    fipo::csv::write_file(out_path(ctx, "skipped_dates.csv"), sk);
    std::cerr << "backtest: skipped " << res.skipped.size() << " date(s)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fipo: fixed income portfolio optimiser"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the shared options after the subcommand

  std::string config_path, universe_path, series_path, out_dir = ".", grid_override;
  std::optional<std::uint64_t> seed;
  bool no_stdev = false;

  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--universe", universe_path, "universe CSV");
  app.add_option("--series", series_path, "market series CSV");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the configured seed");
  app.add_flag("--no-stdev", no_stdev, "drop the stdev term from the risk function");
  app.add_option("--grid", grid_override, "risk-limit grid as lo:hi:n");

  auto* price = app.add_subcommand("price", "per-sleeve price/duration table");
  auto* risk = app.add_subcommand("risk", "per-sleeve scenario losses and stdev");
  auto* er = app.add_subcommand("er", "per-sleeve expected-return decomposition");
  auto* optimize = app.add_subcommand("optimize", "solve the configured problem");
  auto* frontier = app.add_subcommand("frontier", "trace and fit the efficient frontier");
  auto* backtest = app.add_subcommand("backtest", "per-date frontiers and factor series");
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic market series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    auto need = [&](bool uni, bool cfg, bool credit) {
      if (uni && universe_path.empty()) throw std::runtime_error("--universe is required");
      if (cfg && config_path.empty()) throw std::runtime_error("--config is required");
      return load_context(config_path, universe_path, out_dir, seed, no_stdev,
                          grid_override, credit);
    };
    if (price->parsed()) cmd_price(need(true, false, false));
    if (risk->parsed()) cmd_risk(need(true, true, false));
    if (er->parsed()) cmd_er(need(true, true, true));
    if (optimize->parsed()) cmd_optimize(need(true, true, true));
    if (frontier->parsed()) cmd_frontier(need(true, true, true));
    if (backtest->parsed()) cmd_backtest(need(true, true, true), series_path);
    if (gen->parsed()) cmd_gen_data(need(true, true, true));
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
