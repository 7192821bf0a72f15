#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "deprec/mdp.hpp"
#include "deprec/payoff.hpp"

namespace deprec {

enum class Criterion {
  discounted,
  discounted_depreciating,
  average,
  average_depreciating,
};

std::string criterion_name(Criterion c);

struct ValueVector {
  std::vector<double> values;
  Criterion criterion;
  DiscountSpec params;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  Policy greedy_policy;
  // Sup-norm gap between the depreciating fixed point and the scaled plain
  // discounted solution; filled by solve_discounted_depreciating only.
  double scaling_check_gap = 0.0;
};

// Raised when the average-reward solvers meet a policy inducing two or more
// closed recurrent classes.
struct MultichainError : std::runtime_error {
  Policy witness;
  explicit MultichainError(const std::string& what, Policy w)
      : std::runtime_error(what), witness(std::move(w)) {}
};

// Classic value iteration; stops when the iterate residual drops below
// tol*(1-lambda)/(2*lambda), which bounds the fixed-point error by tol.
std::pair<ValueVector, SolveReport> value_iteration_discounted(
    const Mdp& mdp, double lambda, double tol);

// Iterates the scaled-reward Bellman operator
//   V(s) = max_a R(s,a)/(1-lambda*gamma) + lambda E_T[V]
// directly, then self-checks against value iteration via the reduction
// V = V_lambda/(1-lambda*gamma).
std::pair<ValueVector, SolveReport> solve_discounted_depreciating(
    const Mdp& mdp, const DiscountSpec& spec, double tol);

// Direct dense solve of (I - lambda T_pi) v = r_pi, scaled by
// 1/(1-lambda*gamma) for the depreciating criterion.
ValueVector policy_evaluation(const Mdp& mdp, const Policy& policy,
                              const DiscountSpec& spec, Criterion criterion);

struct AverageSolve {
  double gain = 0.0;
  SolveReport report;
};

// Optimal gain by relative value iteration under the unichain assumption.
// Throws MultichainError when some enumerable policy is multichain.
AverageSolve solve_average(const Mdp& mdp, double tol);

std::pair<ValueVector, SolveReport> solve_average_depreciating(
    const Mdp& mdp, double gamma, double tol);

struct TauberianRow {
  double lambda;
  std::vector<double> scaled_values;  // (1-lambda) * V_lambda^gamma per state
};

struct TauberianTable {
  std::vector<TauberianRow> rows;
  std::vector<double> reference;  // average depreciating value per state
  std::vector<double> gaps;       // sup-norm gap to reference, per row
};

TauberianTable tauberian_probe(const Mdp& mdp, double gamma,
                               std::span<const double> lambda_grid, double tol);

// Evaluates every stationary deterministic policy and returns the per-state
// maximum with a lexicographically-first argmax policy.
std::pair<ValueVector, Policy> brute_force_optimal(
    const Mdp& mdp, const DiscountSpec& spec, Criterion criterion,
    std::uint64_t cap = 1000000);

// Gain of a fixed unichain policy via the stationary distribution of its
// closed recurrent class.
double policy_gain(const Mdp& mdp, const Policy& policy);

}  // namespace deprec
