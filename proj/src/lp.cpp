#include "deprec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dense_solve.hpp"

namespace deprec {

namespace {

void require_weights(const Mdp& mdp, std::span<const double> weights) {
  if (weights.size() != static_cast<std::size_t>(mdp.num_states()))
    throw std::invalid_argument("weight vector size mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
}

// Standard-form expansion of an LpInstance: min c x, A x = b, x >= 0, b >= 0.
struct StandardForm {
  std::vector<std::vector<double>> cols;  // column-major, m entries each
  std::vector<double> cost;
  std::vector<double> b;
  std::vector<std::string> col_names;
  // original variable -> (plus column, minus column or -1)
  std::vector<std::pair<int, int>> var_cols;
  int first_artificial = 0;
};

StandardForm to_standard_form(const LpInstance& lp) {
  const int m = lp.num_rows();
  const int n = lp.num_vars();
  StandardForm sf;
  sf.b = lp.rhs;

  auto add_col = [&](const std::string& name) {
    sf.cols.emplace_back(m, 0.0);
    sf.col_names.push_back(name);
    sf.cost.push_back(0.0);
    return static_cast<int>(sf.cols.size()) - 1;
  };

  for (int j = 0; j < n; ++j) {
    const std::string base = j < static_cast<int>(lp.variable_names.size())
                                 ? lp.variable_names[j]
                                 : "x" + std::to_string(j);
    const int plus = add_col(base);
    int minus = -1;
    if (!lp.nonneg[j]) minus = add_col(base + "-");
    for (int i = 0; i < m; ++i) {
      sf.cols[plus][i] = lp.rows[i][j];
      if (minus >= 0) sf.cols[minus][i] = -lp.rows[i][j];
    }
    const double sign = lp.sense == Sense::minimize ? 1.0 : -1.0;
    sf.cost[plus] = sign * lp.objective[j];
    if (minus >= 0) sf.cost[minus] = -sign * lp.objective[j];
    sf.var_cols.push_back({plus, minus});
  }

  for (int i = 0; i < m; ++i) {
    if (lp.relations[i] == Relation::le) {
      const int c = add_col("slack" + std::to_string(i));
      sf.cols[c][i] = 1.0;
    } else if (lp.relations[i] == Relation::ge) {
      const int c = add_col("surplus" + std::to_string(i));
      sf.cols[c][i] = -1.0;
    }
  }

  for (int i = 0; i < m; ++i) {
    if (sf.b[i] < 0.0) {
      sf.b[i] = -sf.b[i];
      for (auto& col : sf.cols) col[i] = -col[i];
    }
  }

  sf.first_artificial = static_cast<int>(sf.cols.size());
  for (int i = 0; i < m; ++i) {
    const int c = add_col("art" + std::to_string(i));
    sf.cols[c][i] = 1.0;
  }
  return sf;
}

struct SimplexState {
  std::vector<int> basis;
  std::vector<double> x_basic;
};

enum class PhaseResult { optimal, unbounded, iteration_limit };

// Revised simplex with Bland's rule. Columns with banned[j] never enter.
PhaseResult run_phase(const StandardForm& sf, const std::vector<double>& cost,
                      const std::vector<char>& banned, SimplexState& state,
                      int& iterations_left) {
  const int m = static_cast<int>(sf.b.size());
  const int ncols = static_cast<int>(sf.cols.size());
  while (iterations_left-- > 0) {
    std::vector<std::vector<double>> basis_matrix(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) basis_matrix[i][k] = sf.cols[state.basis[k]][i];
    std::vector<std::vector<double>> basis_t(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) basis_t[i][k] = basis_matrix[k][i];

    state.x_basic = detail::solve_dense(basis_matrix, sf.b);
    std::vector<double> cb(m);
    for (int k = 0; k < m; ++k) cb[k] = cost[state.basis[k]];
    const std::vector<double> multipliers = detail::solve_dense(basis_t, cb);

    std::vector<char> in_basis(ncols, 0);
    for (int k = 0; k < m; ++k) in_basis[state.basis[k]] = 1;

    int entering = -1;
    for (int j = 0; j < ncols; ++j) {
      if (in_basis[j] || banned[j]) continue;
      double reduced = cost[j];
      for (int i = 0; i < m; ++i) reduced -= multipliers[i] * sf.cols[j][i];
      if (reduced < -kLpPivotTol) {
        entering = j;  // Bland: smallest eligible index
        break;
      }
    }
    if (entering < 0) return PhaseResult::optimal;

    std::vector<std::vector<double>> bm(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) bm[i][k] = sf.cols[state.basis[k]][i];
    const std::vector<double> direction =
        detail::solve_dense(std::move(bm), sf.cols[entering]);

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) {
      if (direction[k] <= kLpPivotTol) continue;
      const double ratio = std::max(state.x_basic[k], 0.0) / direction[k];
      const bool tie = std::abs(ratio - best_ratio) <= 1e-12;
      if (ratio < best_ratio - 1e-12 ||
          (tie && leaving >= 0 && state.basis[k] < state.basis[leaving])) {
        best_ratio = ratio;
        leaving = k;
      }
    }
    if (leaving < 0) return PhaseResult::unbounded;
    state.basis[leaving] = entering;
  }
  return PhaseResult::iteration_limit;
}

}  // namespace

std::string lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

LpSolution simplex_solve(const LpInstance& lp, int iteration_cap) {
  if (lp.num_vars() == 0 || lp.num_rows() == 0)
    throw std::invalid_argument("empty linear program");
  if (lp.rows.size() != static_cast<std::size_t>(lp.num_rows()) ||
      lp.relations.size() != static_cast<std::size_t>(lp.num_rows()) ||
      lp.nonneg.size() != static_cast<std::size_t>(lp.num_vars()))
    throw std::invalid_argument("inconsistent LP dimensions");
  for (const auto& row : lp.rows)
    if (row.size() != static_cast<std::size_t>(lp.num_vars()))
      throw std::invalid_argument("inconsistent LP row width");

  const StandardForm sf = to_standard_form(lp);
  const int m = static_cast<int>(sf.b.size());
  const int ncols = static_cast<int>(sf.cols.size());

  SimplexState state;
  state.basis.resize(m);
  for (int i = 0; i < m; ++i) state.basis[i] = sf.first_artificial + i;

  LpSolution solution;
  int iterations_left = iteration_cap;

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1_cost(ncols, 0.0);
  for (int j = sf.first_artificial; j < ncols; ++j) phase1_cost[j] = 1.0;
  std::vector<char> none_banned(ncols, 0);
  PhaseResult res = run_phase(sf, phase1_cost, none_banned, state, iterations_left);
  if (res == PhaseResult::iteration_limit) {
    solution.status = LpStatus::iteration_limit;
    return solution;
  }
  double artificial_mass = 0.0;
  for (int k = 0; k < m; ++k)
    if (state.basis[k] >= sf.first_artificial)
      artificial_mass += std::max(state.x_basic[k], 0.0);
  if (artificial_mass > kLpFeasibilityTol) {
    solution.status = LpStatus::infeasible;
    return solution;
  }

  // Phase 2: artificials may remain basic at level zero but never re-enter.
  std::vector<char> banned(ncols, 0);
  for (int j = sf.first_artificial; j < ncols; ++j) banned[j] = 1;
  res = run_phase(sf, sf.cost, banned, state, iterations_left);
  if (res == PhaseResult::iteration_limit) {
    solution.status = LpStatus::iteration_limit;
    return solution;
  }
  if (res == PhaseResult::unbounded) {
    solution.status = LpStatus::unbounded;
    return solution;
  }

  std::vector<double> full(ncols, 0.0);
  for (int k = 0; k < m; ++k) full[state.basis[k]] = state.x_basic[k];
  solution.point.resize(lp.num_vars());
  for (int j = 0; j < lp.num_vars(); ++j) {
    const auto [plus, minus] = sf.var_cols[j];
    solution.point[j] = full[plus] - (minus >= 0 ? full[minus] : 0.0);
  }
  solution.objective = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j)
    solution.objective += lp.objective[j] * solution.point[j];
  for (int k = 0; k < m; ++k)
    solution.basis.push_back(sf.col_names[state.basis[k]]);

  // feasibility of the reported point against the original constraints
  for (int i = 0; i < lp.num_rows(); ++i) {
    double lhs = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j)
      lhs += lp.rows[i][j] * solution.point[j];
    const double viol = lp.relations[i] == Relation::le ? lhs - lp.rhs[i]
                        : lp.relations[i] == Relation::ge ? lp.rhs[i] - lhs
                        : std::abs(lhs - lp.rhs[i]);
    const double scale = 1.0 + std::abs(lp.rhs[i]);
    if (viol > kLpFeasibilityTol * scale)
      throw std::runtime_error("simplex produced an infeasible point");
  }
  solution.status = LpStatus::optimal;
  return solution;
}

LpInstance build_primal_lp(const Mdp& mdp, const DiscountSpec& spec,
                           std::span<const double> weights, LpVariant variant) {
  spec.require_valid();
  require_weights(mdp, weights);
  const int n = mdp.num_states();
  const double scale = 1.0 / (1.0 - spec.lambda * spec.gamma);
  LpInstance lp;
  lp.sense = Sense::minimize;
  lp.objective.assign(weights.begin(), weights.end());
  lp.nonneg.assign(n, false);  // value variables are free
  for (int s = 0; s < n; ++s) lp.variable_names.push_back("v_" + mdp.state_names[s]);
  const double trans_scale = variant == LpVariant::paper ? scale : 1.0;
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      std::vector<double> row(n, 0.0);
      for (int t = 0; t < n; ++t)
        row[t] = (s == t ? 1.0 : 0.0) -
                 spec.lambda * mdp.transition[s][a][t] * trans_scale;
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(mdp.reward[s][a] * scale);
      lp.relations.push_back(Relation::ge);
    }
  }
  return lp;
}

LpInstance build_dual_lp(const Mdp& mdp, const DiscountSpec& spec,
                         std::span<const double> weights) {
  spec.require_valid();
  require_weights(mdp, weights);
  const int n = mdp.num_states();
  const double scale = 1.0 / (1.0 - spec.lambda * spec.gamma);
  LpInstance lp;
  lp.sense = Sense::maximize;
  for (int t = 0; t < n; ++t)
    for (int a = 0; a < mdp.num_actions(t); ++a) {
      lp.objective.push_back(mdp.reward[t][a] * scale);
      lp.nonneg.push_back(true);
      lp.variable_names.push_back("y_" + mdp.state_names[t] + "_" +
                                  mdp.action_names[t][a]);
    }
  for (int s = 0; s < n; ++s) {
    std::vector<double> row;
    row.reserve(lp.objective.size());
    for (int t = 0; t < n; ++t)
      for (int a = 0; a < mdp.num_actions(t); ++a)
        row.push_back((s == t ? 1.0 : 0.0) -
                      spec.lambda * mdp.transition[t][a][s]);
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(weights[s]);
    lp.relations.push_back(Relation::eq);
  }
  return lp;
}

Policy policy_from_dual(const Mdp& mdp, const LpSolution& dual) {
  if (dual.status != LpStatus::optimal)
    throw std::invalid_argument("dual solution is not optimal");
  Policy policy{std::vector<int>(mdp.num_states(), 0)};
  std::size_t idx = 0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int best_a = -1;
    for (int a = 0; a < mdp.num_actions(s); ++a, ++idx) {
      const double y = dual.point.at(idx);
      if (y > best) {
        best = y;
        best_a = a;
      }
    }
    if (best <= 1e-9)
      throw std::runtime_error("degenerate dual: no positive weight at state " +
                               mdp.state_names[s]);
    policy.action_of[s] = best_a;
  }
  return policy;
}

std::string serialize_lp(const LpInstance& lp) {
  std::ostringstream out;
  out.precision(17);
  out << "lp " << (lp.sense == Sense::minimize ? "minimize" : "maximize")
      << " vars " << lp.num_vars() << "\n";
  out << "obj";
  for (double c : lp.objective) out << " " << c;
  out << "\n";
  out << "bounds";
  for (bool nn : lp.nonneg) out << " " << (nn ? "nonneg" : "free");
  out << "\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    out << "row";
    for (double a : lp.rows[i]) out << " " << a;
    out << " "
        << (lp.relations[i] == Relation::le   ? "<="
            : lp.relations[i] == Relation::eq ? "="
                                              : ">=")
        << " " << lp.rhs[i] << "\n";
  }
  return out.str();
}

}  // namespace deprec
