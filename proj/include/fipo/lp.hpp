#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fipo {

/// Bounded linear program:  maximise c.u  s.t.  A u <= b,  lo <= u <= hi.
/// Bounds may be infinite; slack-variable lower bounds may be negative.
struct LinearProgram {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<std::string> var_names;

  struct Row {
    std::string label;
    std::vector<double> coeffs;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_variable(const std::string& name, double lo, double hi, double obj) {
    if (!(lo <= hi)) throw std::invalid_argument("LinearProgram: lo > hi for " + name);
    var_names.push_back(name);
    lower.push_back(lo);
    upper.push_back(hi);
    objective.push_back(obj);
    return num_vars() - 1;
  }

  void add_row(const std::string& label, std::vector<double> coeffs, double rhs) {
    if (coeffs.size() != objective.size())
      throw std::invalid_argument("LinearProgram: row size mismatch in " + label);
    rows.push_back({label, std::move(coeffs), rhs});
  }

  void validate() const {
    for (int j = 0; j < num_vars(); ++j) {
      if (std::isnan(objective[j]) || !(lower[j] <= upper[j]))
        throw std::invalid_argument("LinearProgram: bad variable " + var_names[j]);
    }
    for (const auto& r : rows) {
      if (!std::isfinite(r.rhs))
        throw std::invalid_argument("LinearProgram: non-finite rhs in " + r.label);
      for (double c : r.coeffs)
        if (!std::isfinite(c))
          throw std::invalid_argument("LinearProgram: non-finite coefficient in " + r.label);
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> weights;
  double objective = 0.0;
  std::vector<std::string> binding;      // row labels with zero slack, bound:var
  std::vector<double> row_duals;         // shadow prices of the rows
  std::vector<std::string> infeasible_rows;  // rows violated at the bound point
  int iterations = 0;
};

struct SimplexOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-10;
  int max_iter = 10000;
  int stall_limit = 50;  // non-improving iterations before Bland's rule
};

/// Dense bounded-variable primal simplex, two phases with artificials.
/// Dantzig pricing with a Bland's-rule fallback after a stall; ratio-test
/// ties break to the lowest variable index, so a solve is deterministic.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearProgram& lp, SimplexOptions opt = {})
      : lp_(lp), opt_(opt) {}

  LpSolution solve() {
    lp_.validate();
    const int n = lp_.num_vars();
    const int m = static_cast<int>(lp_.rows.size());
    n_ = n;
    m_ = m;
    total_ = n + m;  // artificials appended on demand

    lower_.assign(lp_.lower.begin(), lp_.lower.end());
    upper_.assign(lp_.upper.begin(), lp_.upper.end());
    for (int i = 0; i < m; ++i) {
      lower_.push_back(0.0);
      upper_.push_back(inf());
    }

    tableau_.assign(static_cast<size_t>(m) * total_, 0.0);
    beta_.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) t(i, j) = lp_.rows[i].coeffs[j];
      t(i, n + i) = 1.0;
      beta_[i] = lp_.rows[i].rhs;
    }

    // nonbasic start at a finite bound (prefer lower), free vars at zero
    state_.assign(total_, State::AtLower);
    value_.assign(total_, 0.0);
    for (int j = 0; j < n; ++j) {
      if (std::isfinite(lower_[j])) {
        state_[j] = State::AtLower;
        value_[j] = lower_[j];
      } else if (std::isfinite(upper_[j])) {
        state_[j] = State::AtUpper;
        value_[j] = upper_[j];
      } else {
        state_[j] = State::Free;
        value_[j] = 0.0;
      }
    }

    // initial basis: slack where the residual is nonnegative, else artificial
    basis_.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      double r = beta_[i];
      for (int j = 0; j < n; ++j) r -= t(i, j) * value_[j];
      if (r >= 0.0) {
        basis_[i] = n + i;
        state_[n + i] = State::Basic;
      } else {
        // slack stays nonbasic at 0; artificial column -e_i, row negated so
        // the basic column is +e_i and the artificial value is -r > 0
        const int a = add_artificial();
        for (int j = 0; j < total_; ++j) t(i, j) = -t(i, j);
        beta_[i] = -beta_[i];
        t(i, a) = 1.0;
        basis_[i] = a;
        state_[a] = State::Basic;
      }
    }

    LpSolution sol;
    sol.weights.assign(n, 0.0);

    if (num_artificials_ > 0) {
      const LpStatus phase1 = run_phase(/*phase_one=*/true);
      if (phase1 != LpStatus::Optimal) {
        sol.status = phase1;
        sol.iterations = iterations_;
        return sol;
      }
      double infeas = 0.0;
      for (int a = n + m; a < total_; ++a) infeas += current_value(a);
      if (infeas > opt_.feas_tol) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations_;
        sol.infeasible_rows = violated_rows_at_start();
        return sol;
      }
      // pin artificials at zero for phase 2
      for (int a = n + m; a < total_; ++a) {
        lower_[a] = 0.0;
        upper_[a] = 0.0;
      }
    }

    const LpStatus phase2 = run_phase(/*phase_one=*/false);
    sol.status = phase2;
    sol.iterations = iterations_;
    if (phase2 != LpStatus::Optimal) return sol;

    refresh_basic_values();
    for (int j = 0; j < n; ++j) {
      double v = current_value(j);
      if (std::isfinite(lower_[j])) v = std::max(v, lower_[j]);
      if (std::isfinite(upper_[j])) v = std::min(v, upper_[j]);
      sol.weights[j] = v;
    }
    sol.objective = 0.0;
    for (int j = 0; j < n; ++j) sol.objective += lp_.objective[j] * sol.weights[j];

    // binding set and duals
    std::vector<double> z = reduced_costs(/*phase_one=*/false);
    sol.row_duals.assign(m, 0.0);
    for (int i = 0; i < m; ++i) sol.row_duals[i] = -z[n + i];
    for (int i = 0; i < m; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += lp_.rows[i].coeffs[j] * sol.weights[j];
      if (lhs >= lp_.rows[i].rhs - 1e-7) sol.binding.push_back(lp_.rows[i].label);
    }
    for (int j = 0; j < n; ++j)
      if (std::isfinite(upper_[j]) && sol.weights[j] >= upper_[j] - 1e-9 &&
          upper_[j] > lower_[j])
        sol.binding.push_back("bound:" + lp_.var_names[j]);
    return sol;
  }

 private:
  enum class State { Basic, AtLower, AtUpper, Free };

  static double inf() { return std::numeric_limits<double>::infinity(); }

  double& t(int i, int j) { return tableau_[static_cast<size_t>(i) * total_ + j]; }
  double tconst(int i, int j) const {
    return tableau_[static_cast<size_t>(i) * total_ + j];
  }

  int add_artificial() {
    ++num_artificials_;
    ++total_;
    lower_.push_back(0.0);
    upper_.push_back(inf());
    state_.push_back(State::AtLower);
    value_.push_back(0.0);
    // widen the tableau by one column
    std::vector<double> wide(static_cast<size_t>(m_) * total_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < total_ - 1; ++j)
        wide[static_cast<size_t>(i) * total_ + j] =
            tableau_[static_cast<size_t>(i) * (total_ - 1) + j];
    tableau_ = std::move(wide);
    return total_ - 1;
  }

  double objective_coeff(int j, bool phase_one) const {
    if (phase_one) return j >= n_ + m_ ? -1.0 : 0.0;  // maximise -sum artificials
    return j < n_ ? lp_.objective[j] : 0.0;
  }

  void refresh_basic_values() {
    for (int i = 0; i < m_; ++i) {
      double v = beta_[i];
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == State::Basic || value_[j] == 0.0) continue;
        v -= tconst(i, j) * value_[j];
      }
      value_[basis_[i]] = v;
    }
  }

  double current_value(int j) const { return value_[j]; }

  std::vector<double> reduced_costs(bool phase_one) {
    std::vector<double> z(total_, 0.0);
    for (int j = 0; j < total_; ++j) z[j] = objective_coeff(j, phase_one);
    for (int i = 0; i < m_; ++i) {
      const double cb = objective_coeff(basis_[i], phase_one);
      if (cb == 0.0) continue;
      for (int j = 0; j < total_; ++j) z[j] -= cb * tconst(i, j);
    }
    return z;
  }

  std::vector<std::string> violated_rows_at_start() const {
    // diagnostic: rows violated with every variable at its start bound
    std::vector<std::string> out;
    for (int i = 0; i < m_; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n_; ++j) {
        double v = 0.0;
        if (std::isfinite(lp_.lower[j]))
          v = lp_.lower[j];
        else if (std::isfinite(lp_.upper[j]))
          v = lp_.upper[j];
        lhs += lp_.rows[i].coeffs[j] * v;
      }
      if (lhs > lp_.rows[i].rhs + opt_.feas_tol) out.push_back(lp_.rows[i].label);
    }
    return out;
  }

  double phase_objective(bool phase_one) {
    refresh_basic_values();
    double obj = 0.0;
    for (int j = 0; j < total_; ++j) {
      const double c = objective_coeff(j, phase_one);
      if (c != 0.0) obj += c * value_[j];
    }
    return obj;
  }

  LpStatus run_phase(bool phase_one) {
    bool bland = false;
    int stall = 0;
    double best_obj = -inf();
    while (true) {
      if (iterations_ >= opt_.max_iter) return LpStatus::IterationLimit;
      refresh_basic_values();
      const std::vector<double> z = reduced_costs(phase_one);

      // entering variable; free variables may enter in either direction
      int enter = -1;
      double best_score = opt_.opt_tol;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == State::Basic) continue;
        if (lower_[j] == upper_[j]) continue;  // fixed (pinned artificials)
        double score = 0.0;
        if (state_[j] == State::AtLower)
          score = z[j];
        else if (state_[j] == State::AtUpper)
          score = -z[j];
        else
          score = std::fabs(z[j]);
        if (score > best_score) {
          best_score = score;
          enter = j;
          if (bland) break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      double dir = 1.0;
      if (state_[enter] == State::AtUpper)
        dir = -1.0;
      else if (state_[enter] == State::Free)
        dir = (z[enter] > 0.0) ? 1.0 : -1.0;

      // ratio test
      double t_max = inf();
      int leave_row = -1;
      bool leave_at_upper = false;
      if (std::isfinite(lower_[enter]) && std::isfinite(upper_[enter]))
        t_max = upper_[enter] - lower_[enter];

      for (int i = 0; i < m_; ++i) {
        const double step = -dir * tconst(i, enter);
        if (std::fabs(step) <= opt_.pivot_tol) continue;
        const int bvar = basis_[i];
        const double xb = value_[bvar];
        double limit;
        bool hits_upper;
        if (step > 0.0) {
          if (!std::isfinite(upper_[bvar])) continue;
          limit = (upper_[bvar] - xb) / step;
          hits_upper = true;
        } else {
          if (!std::isfinite(lower_[bvar])) continue;
          limit = (xb - lower_[bvar]) / (-step);
          hits_upper = false;
        }
        if (limit < 0.0) limit = 0.0;
        if (limit < t_max - 1e-12 ||
            (limit < t_max + 1e-12 && leave_row >= 0 && bvar < basis_[leave_row])) {
          t_max = limit;
          leave_row = i;
          leave_at_upper = hits_upper;
        }
      }

      if (!std::isfinite(t_max)) return LpStatus::Unbounded;

      ++iterations_;
      if (leave_row < 0) {
        // bound flip on the entering variable
        state_[enter] = (dir > 0.0) ? State::AtUpper : State::AtLower;
        value_[enter] = (dir > 0.0) ? upper_[enter] : lower_[enter];
      } else {
        pivot(leave_row, enter, dir, t_max, leave_at_upper);
      }

      const double obj = phase_objective(phase_one);
      if (obj > best_obj + 1e-13) {
        best_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall >= opt_.stall_limit) {
        bland = true;
      }
    }
  }

  void pivot(int row, int enter, double dir, double step, bool leave_at_upper) {
    const int leaving = basis_[row];
    const double new_value = value_[enter] + dir * step;

    const double piv = t(row, enter);
    const double inv = 1.0 / piv;
    for (int j = 0; j < total_; ++j) t(row, j) *= inv;
    beta_[row] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t(i, enter);
      if (f == 0.0) continue;
      for (int j = 0; j < total_; ++j) t(i, j) -= f * t(row, j);
      beta_[i] -= f * beta_[row];
    }

    basis_[row] = enter;
    state_[enter] = State::Basic;
    value_[enter] = new_value;
    state_[leaving] = leave_at_upper ? State::AtUpper : State::AtLower;
    value_[leaving] = leave_at_upper ? upper_[leaving] : lower_[leaving];
  }

  LinearProgram lp_;
  SimplexOptions opt_;
  int n_ = 0, m_ = 0, total_ = 0;
  int num_artificials_ = 0;
  int iterations_ = 0;
  std::vector<double> tableau_;
  std::vector<double> beta_;
  std::vector<double> lower_, upper_;
  std::vector<int> basis_;
  std::vector<State> state_;
  std::vector<double> value_;
};

inline LpSolution solve(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  return SimplexSolver(lp, opt).solve();
}

}  // namespace fipo
