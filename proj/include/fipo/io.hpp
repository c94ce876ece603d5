#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fipo/backtest.hpp"
#include "fipo/credit.hpp"
#include "fipo/csv.hpp"
#include "fipo/optimize.hpp"
#include "fipo/risk.hpp"
#include "fipo/scenario.hpp"
#include "fipo/sleeve.hpp"

namespace fipo {

// ---------------------------------------------------------------------------
// universe file: one row per sleeve
//   name,ticker,maturity,coupon,frequency,rating,yield,spread,dur_ir,dur_cr,
//   floating,tags,max_weight,stress_spread
// Empty duration cells are recomputed from (T, c, m, y). Tags are a
// pipe-separated subset of HY|EM|STRUCT|FIN.

inline std::vector<Sleeve> load_universe(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const std::vector<std::string> expect = {
      "name",   "ticker",   "maturity", "coupon",     "frequency",
      "rating", "yield",    "spread",   "dur_ir",     "dur_cr",
      "floating", "tags",   "max_weight", "stress_spread"};
  if (t.header != expect)
    throw std::runtime_error("load_universe: unexpected header in " + path);
  if (t.rows.empty())
    throw std::runtime_error("load_universe: empty universe in " + path);

  std::vector<Sleeve> out;
  std::vector<std::string> errors;
  std::map<std::string, int> seen;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    try {
      if (row.size() != expect.size())
        throw std::invalid_argument("wrong column count");
      Sleeve s;
      s.name = row[0];
      s.ticker = row[1];
      s.maturity = csv::parse_double(row[2], where);
      s.coupon = csv::parse_double(row[3], where);
      s.frequency = static_cast<int>(csv::parse_long(row[4], where));
      s.rating = Rating::parse(row[5]);
      s.yield = csv::parse_double(row[6], where);
      s.spread = csv::parse_double(row[7], where);
      s.floating = csv::parse_long(row[10], where) != 0;
      if (row[8].empty() || row[9].empty()) {
        const auto dc = duration_convexity(s.maturity, s.coupon, s.frequency, s.yield);
        s.dur_cr = row[9].empty() ? dc.duration : csv::parse_double(row[9], where);
        s.dur_ir = row[8].empty() ? (s.floating ? 0.0 : dc.duration)
                                  : csv::parse_double(row[8], where);
      } else {
        s.dur_ir = csv::parse_double(row[8], where);
        s.dur_cr = csv::parse_double(row[9], where);
      }
      std::stringstream tags(row[11]);
      std::string tag;
      while (std::getline(tags, tag, '|')) {
        tag = csv::trim(tag);
        if (tag.empty()) continue;
        if (tag == "HY") s.high_yield = true;
        else if (tag == "EM") s.emerging = true;
        else if (tag == "STRUCT") s.structured = true;
        else if (tag == "FIN") s.financial = true;
        else throw std::invalid_argument("unknown tag '" + tag + "'");
      }
      s.max_weight = csv::parse_double(row[12], where);
      s.stress_spread = csv::parse_double(row[13], where);
      s.validate();
      if (seen.count(s.name)) throw std::invalid_argument("duplicate name " + s.name);
      seen[s.name] = 1;
      out.push_back(std::move(s));
    } catch (const std::exception& e) {
      errors.push_back(where + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "load_universe: invalid rows in " + path;
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  return out;
}

inline void save_universe(const std::string& path, const std::vector<Sleeve>& sleeves) {
  csv::Table t;
  t.header = {"name",   "ticker",   "maturity", "coupon",     "frequency",
              "rating", "yield",    "spread",   "dur_ir",     "dur_cr",
              "floating", "tags",   "max_weight", "stress_spread"};
  for (const auto& s : sleeves) {
    std::string tags;
    for (const char* tag : {s.high_yield ? "HY" : "", s.emerging ? "EM" : "",
                            s.structured ? "STRUCT" : "", s.financial ? "FIN" : ""}) {
      if (*tag == '\0') continue;
      if (!tags.empty()) tags += '|';
      tags += tag;
    }
    t.rows.push_back({s.name, s.ticker, csv::format_double(s.maturity),
                      csv::format_double(s.coupon), std::to_string(s.frequency),
                      s.rating.label(), csv::format_double(s.yield),
                      csv::format_double(s.spread), csv::format_double(s.dur_ir),
                      csv::format_double(s.dur_cr), s.floating ? "1" : "0", tags,
                      csv::format_double(s.max_weight),
                      csv::format_double(s.stress_spread)});
  }
  csv::write_file(path, t);
}

// ---------------------------------------------------------------------------
// transition matrix file: header  from,<state...>;  one row per state,
// probabilities in [0,1], last state D.

inline TransitionMatrix load_transitions(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  if (t.header.size() < 3 || t.header[0] != "from")
    throw std::runtime_error("load_transitions: expected 'from,<states...>' in " + path);
  std::vector<Rating> states;
  for (size_t j = 1; j < t.header.size(); ++j) states.push_back(Rating::parse(t.header[j]));
  const int n = static_cast<int>(states.size());
  if (static_cast<int>(t.rows.size()) != n)
    throw std::runtime_error("load_transitions: need one row per state in " + path);
  std::vector<double> probs(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    if (row.size() != states.size() + 1 || Rating::parse(row[0]) != states[i])
      throw std::runtime_error("load_transitions: row " + std::to_string(i + 1) +
                               " does not match header order");
    for (int j = 0; j < n; ++j)
      probs[i * n + j] = csv::parse_double(row[j + 1], "row " + std::to_string(i + 1));
  }
  return TransitionMatrix(std::move(states), std::move(probs));
}

// ---------------------------------------------------------------------------
// rating curve file: header  rating,<tenor...>;  row RF holds riskfree zero
// rates, row RECOVERY holds the default-state recovery in its first cell,
// remaining rows are per-rating spread curves.

inline RatingCurveSet load_rating_curves(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  if (t.header.size() < 3 || t.header[0] != "rating")
    throw std::runtime_error("load_rating_curves: expected 'rating,<tenors...>' in " + path);
  RatingCurveSet out;
  for (size_t j = 1; j < t.header.size(); ++j)
    out.tenors.push_back(csv::parse_double(t.header[j], "header"));
  bool have_rf = false;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (row.empty()) continue;
    if (row[0] == "RECOVERY") {
      out.recovery.recovery_rate = csv::parse_double(row[1], where);
      continue;
    }
    if (row.size() != t.header.size())
      throw std::runtime_error("load_rating_curves: wrong column count at " + where);
    std::vector<double> values(out.tenors.size());
    for (size_t j = 0; j < values.size(); ++j)
      values[j] = csv::parse_double(row[j + 1], where);
    if (row[0] == "RF") {
      out.riskfree = std::move(values);
      have_rf = true;
    } else {
      out.spreads[Rating::parse(row[0]).index()] = std::move(values);
    }
  }
  if (!have_rf) throw std::runtime_error("load_rating_curves: missing RF row in " + path);
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// market series file (wide): date, rf:<tenor>..., y:<sleeve>..., s:<sleeve>...

inline void save_market_series(const std::string& path, const MarketSeries& series) {
  csv::Table t;
  t.header.push_back("date");
  for (double tenor : series.rf_tenors) t.header.push_back("rf:" + csv::format_double(tenor));
  for (const auto& n : series.sleeve_names) t.header.push_back("y:" + n);
  for (const auto& n : series.sleeve_names) t.header.push_back("s:" + n);
  for (size_t d = 0; d < series.dates.size(); ++d) {
    std::vector<std::string> row;
    row.push_back(series.dates[d]);
    for (double v : series.snapshots[d].riskfree) row.push_back(csv::format_double(v));
    for (double v : series.snapshots[d].sleeve_yield) row.push_back(csv::format_double(v));
    for (double v : series.snapshots[d].sleeve_spread) row.push_back(csv::format_double(v));
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

inline MarketSeries load_market_series(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  if (t.header.empty() || t.header[0] != "date")
    throw std::runtime_error("load_market_series: expected leading date column in " + path);
  MarketSeries out;
  std::vector<size_t> rf_cols, y_cols, s_cols;
  for (size_t j = 1; j < t.header.size(); ++j) {
    const std::string& h = t.header[j];
    if (h.rfind("rf:", 0) == 0) {
      out.rf_tenors.push_back(csv::parse_double(h.substr(3), "header"));
      rf_cols.push_back(j);
    } else if (h.rfind("y:", 0) == 0) {
      out.sleeve_names.push_back(h.substr(2));
      y_cols.push_back(j);
    } else if (h.rfind("s:", 0) == 0) {
      s_cols.push_back(j);
    } else {
      throw std::runtime_error("load_market_series: unknown column '" + h + "'");
    }
  }
  if (s_cols.size() != y_cols.size())
    throw std::runtime_error("load_market_series: yield/spread column mismatch");
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      throw std::runtime_error("load_market_series: ragged row in " + path);
    MarketSnapshot snap;
    out.dates.push_back(row[0]);
    for (size_t j : rf_cols) snap.riskfree.push_back(csv::parse_double(row[j]));
    for (size_t j : y_cols) snap.sleeve_yield.push_back(csv::parse_double(row[j]));
    for (size_t j : s_cols) snap.sleeve_spread.push_back(csv::parse_double(row[j]));
    out.snapshots.push_back(std::move(snap));
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// synthetic history: one Gaussian rate factor moving the riskfree curve in
// parallel (mean reversion kappa), lognormal spreads with common correlation
// rho and martingale drift. Deterministic under the seed.

struct SyntheticParams {
  RateModelParams rates;
  double rho = 0.8;
  double theta = 0.0;  // drift target of the rate factor
};

inline MarketSeries generate_synthetic_history(const SyntheticParams& params,
                                               const std::vector<Sleeve>& universe,
                                               const RatingCurveSet& curves,
                                               const std::vector<std::string>& dates,
                                               std::uint64_t seed) {
  for (size_t i = 1; i < dates.size(); ++i)
    if (Date::parse(dates[i]).serial() <= Date::parse(dates[i - 1]).serial())
      throw std::invalid_argument("generate_synthetic_history: dates must increase");
  MarketSeries out;
  out.rf_tenors = curves.tenors;
  for (const auto& s : universe) out.sleeve_names.push_back(s.name);
  out.dates = dates;

  std::mt19937_64 rate_gen(substream_seed(seed, 0));
  std::mt19937_64 common_gen(substream_seed(seed, 1));
  std::vector<std::mt19937_64> idio;
  for (size_t j = 0; j < universe.size(); ++j)
    idio.emplace_back(substream_seed(seed, 2 + j));
  std::normal_distribution<double> normal(0.0, 1.0);

  double factor = 0.0;
  std::vector<double> spreads;
  for (const auto& s : universe) spreads.push_back(s.spread);

  const double sq_rho = std::sqrt(params.rho);
  const double sq_idio = std::sqrt(1.0 - params.rho);
  for (size_t d = 0; d < dates.size(); ++d) {
    if (d > 0) {
      const double dt =
          year_fraction(Date::parse(dates[d - 1]), Date::parse(dates[d]));
      const double sq_dt = std::sqrt(dt);
      factor += (params.theta - params.rates.kappa * factor) * dt +
                params.rates.sigma_y * sq_dt * normal(rate_gen);
      const double zc = normal(common_gen);
      for (size_t j = 0; j < universe.size(); ++j) {
        const double z = sq_rho * zc + sq_idio * normal(idio[j]);
        const double vol = params.rates.sigma_hat;
        spreads[j] *= std::exp(vol * sq_dt * z - 0.5 * vol * vol * dt);
      }
    }
    MarketSnapshot snap;
    snap.riskfree = curves.riskfree;
    for (double& r : snap.riskfree) r += factor;
    for (size_t j = 0; j < universe.size(); ++j) {
      RatingCurveSet probe;
      probe.tenors = curves.tenors;
      probe.riskfree = snap.riskfree;
      snap.sleeve_yield.push_back(probe.riskfree_rate(universe[j].maturity) + spreads[j]);
      snap.sleeve_spread.push_back(spreads[j]);
    }
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

// ---------------------------------------------------------------------------
// run configuration (JSON): risk block, caps, scenario list, grid, backtest
// window, data file paths, seed.

struct RunConfig {
  RiskConfig risk;
  ConstraintCaps caps;
  std::vector<ScenarioSpec> scenarios;
  std::vector<double> index_returns;  // per scenario, for the tracking problems
  double grid_lo = 0.005, grid_hi = 0.40;
  int grid_n = 20;
  bool grid_log = true;
  std::string problem = "max_er";  // max_er | track_view | track_minimax
  std::optional<double> risk_limit;
  double horizon_years = 1.0;
  std::string transitions_path = "transitions.csv";
  std::string curves_path = "rating_curves.csv";
  std::string backtest_start = "2000-01-03";
  int backtest_step_months = 3;
  int backtest_dates = 24;
  SyntheticParams synthetic;
  std::uint64_t seed = 42;

  std::vector<double> grid() const { return make_risk_grid(grid_lo, grid_hi, grid_n, grid_log); }
};

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("load_config: bad JSON in " + path + ": " + e.what());
  }
  RunConfig cfg;
  if (j.contains("risk")) {
    const auto& r = j["risk"];
    cfg.risk.sigma_y = r.value("sigma_y", cfg.risk.sigma_y);
    cfg.risk.sigma_spread = r.value("sigma_spread", cfg.risk.sigma_spread);
    cfg.risk.rho = r.value("rho", cfg.risk.rho);
    cfg.risk.dt_years = r.value("dt_years", cfg.risk.dt_years);
    cfg.risk.rate_shock = r.value("rate_shock", cfg.risk.rate_shock);
    cfg.risk.spread_multiplier = r.value("spread_multiplier", cfg.risk.spread_multiplier);
    if (r.contains("alpha")) {
      const auto& a = r["alpha"];
      if (!a.is_array() || a.size() != 4)
        throw std::runtime_error("load_config: risk.alpha must have 4 entries");
      for (int k = 0; k < 4; ++k) cfg.risk.alpha[k] = a[k].get<double>();
    }
    cfg.risk.validate();
  }
  if (j.contains("caps")) {
    const auto& c = j["caps"];
    cfg.caps.high_yield = c.value("high_yield", cfg.caps.high_yield);
    cfg.caps.emerging = c.value("emerging", cfg.caps.emerging);
    cfg.caps.structured = c.value("structured", cfg.caps.structured);
    cfg.caps.financial = c.value("financial", cfg.caps.financial);
    if (c.contains("avg_rating")) {
      if (c["avg_rating"].is_null())
        cfg.caps.avg_rating.reset();
      else
        cfg.caps.avg_rating = Rating::parse(c["avg_rating"].get<std::string>());
    }
    if (c.contains("warf") && !c["warf"].is_null())
      cfg.caps.warf_cap = c["warf"].get<double>();
    for (double cap : {cfg.caps.high_yield, cfg.caps.emerging, cfg.caps.structured,
                       cfg.caps.financial})
      if (cap < 0.0 || cap > 1.0)
        throw std::runtime_error("load_config: sector caps must be in [0,1]");
  }
  if (j.contains("scenarios")) {
    for (const auto& s : j["scenarios"]) {
      ScenarioSpec spec;
      spec.label = s.value("label", "scenario");
      spec.rate_bump = s.value("rate_bump", 0.0);
      if (s.contains("steepen")) {
        SteepenSpec st;
        st.short_bump = s["steepen"].value("short", 0.0);
        st.long_bump = s["steepen"].value("long", 0.0);
        st.pivot_maturity = s["steepen"].value("pivot", 5.0);
        spec.steepen = st;
      }
      spec.spread_multiplier = s.value("spread_multiplier", 1.0);
      spec.stress = s.value("stress", false);
      spec.loss_floor = s.value("floor", 0.0);
      spec.validate();
      cfg.scenarios.push_back(std::move(spec));
      if (s.contains("index_return"))
        cfg.index_returns.push_back(s["index_return"].get<double>());
    }
    if (!cfg.index_returns.empty() &&
        cfg.index_returns.size() != cfg.scenarios.size())
      throw std::runtime_error("load_config: index_return must be set on every scenario or none");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid_lo = g.value("lo", cfg.grid_lo);
    cfg.grid_hi = g.value("hi", cfg.grid_hi);
    cfg.grid_n = g.value("n", cfg.grid_n);
    cfg.grid_log = g.value("log", cfg.grid_log);
  }
  cfg.problem = j.value("problem", cfg.problem);
  if (j.contains("risk_limit") && !j["risk_limit"].is_null())
    cfg.risk_limit = j["risk_limit"].get<double>();
  cfg.horizon_years = j.value("horizon_years", cfg.horizon_years);
  if (j.contains("files")) {
    cfg.transitions_path = j["files"].value("transitions", cfg.transitions_path);
    cfg.curves_path = j["files"].value("curves", cfg.curves_path);
  }
  if (j.contains("backtest")) {
    const auto& b = j["backtest"];
    cfg.backtest_start = b.value("start", cfg.backtest_start);
    cfg.backtest_step_months = b.value("step_months", cfg.backtest_step_months);
    cfg.backtest_dates = b.value("dates", cfg.backtest_dates);
  }
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    cfg.synthetic.rates.sigma_y = s.value("sigma_y", cfg.synthetic.rates.sigma_y);
    cfg.synthetic.rates.kappa = s.value("kappa", cfg.synthetic.rates.kappa);
    cfg.synthetic.rates.sigma_hat = s.value("sigma_hat", cfg.synthetic.rates.sigma_hat);
    cfg.synthetic.rho = s.value("rho", cfg.synthetic.rho);
    cfg.synthetic.theta = s.value("theta", cfg.synthetic.theta);
  }
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

/// Stable hash of the effective configuration, stamped into output preambles.
inline std::uint64_t config_hash(const RunConfig& cfg) {
  std::ostringstream os;
  os << cfg.risk.sigma_y << '|' << cfg.risk.sigma_spread << '|' << cfg.risk.rho << '|'
     << cfg.risk.dt_years << '|' << cfg.risk.rate_shock << '|'
     << cfg.risk.spread_multiplier << '|' << cfg.risk.use_stdev << '|';
  for (double a : cfg.risk.alpha) os << a << ',';
  os << '|' << cfg.caps.high_yield << '|' << cfg.caps.emerging << '|'
     << cfg.caps.structured << '|' << cfg.caps.financial << '|'
     << (cfg.caps.avg_rating ? cfg.caps.avg_rating->label() : "-") << '|'
     << (cfg.caps.warf_cap ? *cfg.caps.warf_cap : -1.0) << '|';
  for (const auto& s : cfg.scenarios) {
    os << s.label << ',' << s.rate_bump << ',' << s.spread_multiplier << ','
       << s.stress << ',' << s.loss_floor << ',';
    if (s.steepen)
      os << s.steepen->short_bump << ',' << s.steepen->long_bump << ','
         << s.steepen->pivot_maturity;
    os << ';';
  }
  os << '|' << cfg.grid_lo << '|' << cfg.grid_hi << '|' << cfg.grid_n << '|'
     << cfg.grid_log << '|' << cfg.problem << '|'
     << (cfg.risk_limit ? *cfg.risk_limit : -1.0) << '|' << cfg.horizon_years << '|'
     << cfg.backtest_start << '|' << cfg.backtest_step_months << '|'
     << cfg.backtest_dates << '|' << cfg.synthetic.rates.sigma_y << '|'
     << cfg.synthetic.rates.kappa << '|' << cfg.synthetic.rates.sigma_hat << '|'
     << cfg.synthetic.rho << '|' << cfg.synthetic.theta << '|' << cfg.seed;
  return csv::fnv1a(os.str());
}

}  // namespace fipo
