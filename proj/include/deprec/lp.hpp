#pragma once

#include <string>
#include <vector>

#include "deprec/mdp.hpp"
#include "deprec/payoff.hpp"

namespace deprec {

enum class Relation { le, eq, ge };
enum class Sense { minimize, maximize };

struct LpInstance {
  Sense sense = Sense::minimize;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;  // dense constraint matrix
  std::vector<double> rhs;
  std::vector<Relation> relations;
  std::vector<bool> nonneg;  // per variable; false = free
  std::vector<std::string> variable_names;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string lp_status_name(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  std::vector<double> point;
  double objective = 0.0;
  std::vector<std::string> basis;  // names of basic standard-form columns
};

inline constexpr double kLpFeasibilityTol = 1e-7;
inline constexpr double kLpPivotTol = 1e-10;

// The value LP: minimize sum_s x_s v_s subject to, for every (s,a),
//   R(s,a)/(1-lambda*gamma) <= sum_t v_t (delta_st - lambda T(t|s,a)).
// The `paper` variant instead scales the transition term by 1/(1-lambda*gamma)
// as well; it does not agree with the Bellman equation and exists only to
// demonstrate the discrepancy.
enum class LpVariant { corrected, paper };

LpInstance build_primal_lp(const Mdp& mdp, const DiscountSpec& spec,
                           std::span<const double> weights,
                           LpVariant variant = LpVariant::corrected);

// Occupancy-measure dual: maximize sum y_{s,a} R(s,a)/(1-lambda*gamma)
// subject to sum_{(t,a)} y_{t,a} (delta_st - lambda T(s|t,a)) = x_s, y >= 0.
LpInstance build_dual_lp(const Mdp& mdp, const DiscountSpec& spec,
                         std::span<const double> weights);

// Two-phase primal simplex with Bland's rule on a dense tableau.
LpSolution simplex_solve(const LpInstance& lp, int iteration_cap = 100000);

// Picks at each state the action with maximal dual weight y*_{s,a}. Throws if
// every action weight at some state is below 1e-9.
Policy policy_from_dual(const Mdp& mdp, const LpSolution& dual);

// Line-oriented text export: one objective row, then one constraint per line.
std::string serialize_lp(const LpInstance& lp);

}  // namespace deprec
