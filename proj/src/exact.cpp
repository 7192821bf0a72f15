#include "deprec/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dense_solve.hpp"

namespace deprec {

namespace {

constexpr int kMaxIterations = 200000000;

void require_valid_mdp(const Mdp& mdp) {
  auto report = validate_mdp(mdp);
  if (!report.empty())
    throw std::invalid_argument("invalid MDP: " + report.front());
}

double expected_value(const Mdp& mdp, int s, int a,
                      const std::vector<double>& v) {
  const auto& row = mdp.transition[s][a];
  double acc = 0.0;
  for (int t = 0; t < mdp.num_states(); ++t) acc += row[t] * v[t];
  return acc;
}

// One Bellman backup with immediate rewards scaled by reward_scale.
// Returns the new values and fills the greedy policy (ties to lowest index).
std::vector<double> bellman_backup(const Mdp& mdp, double lambda,
                                   double reward_scale,
                                   const std::vector<double>& v,
                                   Policy* greedy) {
  const int n = mdp.num_states();
  std::vector<double> out(n);
  if (greedy) greedy->action_of.assign(n, 0);
  for (int s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const double q =
          mdp.reward[s][a] * reward_scale + lambda * expected_value(mdp, s, a, v);
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    out[s] = best;
    if (greedy) greedy->action_of[s] = best_a;
  }
  return out;
}

// Value iteration on the scaled-reward operator, stopping when the iterate
// residual guarantees a fixed-point error of at most tol.
std::pair<std::vector<double>, SolveReport> iterate_to_fixed_point(
    const Mdp& mdp, double lambda, double reward_scale, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const double stop = tol * (1.0 - lambda) / (2.0 * lambda);
  std::vector<double> v(mdp.num_states(), 0.0);
  SolveReport report;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    Policy greedy;
    std::vector<double> next = bellman_backup(mdp, lambda, reward_scale, v, &greedy);
    double residual = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s)
      residual = std::max(residual, std::abs(next[s] - v[s]));
    v = std::move(next);
    if (residual <= stop) {
      report.iterations = iter;
      report.final_residual = residual;
      report.greedy_policy = std::move(greedy);
      return {std::move(v), std::move(report)};
    }
  }
  throw std::runtime_error("value iteration failed to converge");
}

// Unichain guard shared by the average-reward solvers. Checked exhaustively
// when the policy space is enumerable; larger MDPs pass unchecked.
void require_unichain(const Mdp& mdp, std::uint64_t cap = 1000000) {
  if (count_policies(mdp) > cap) return;
  for (const Policy& policy : enumerate_policies(mdp, cap)) {
    const auto classes = closed_recurrent_classes(mdp, policy);
    if (classes.size() >= 2) {
      std::string what = "multichain structure: witness policy (";
      for (std::size_t s = 0; s < policy.action_of.size(); ++s) {
        if (s) what += ", ";
        what += mdp.state_names[s] + ":" +
                mdp.action_names[s][policy.action_of[s]];
      }
      what += ") has " + std::to_string(classes.size()) +
              " closed recurrent classes";
      throw MultichainError(what, policy);
    }
  }
}

}  // namespace

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::discounted: return "discounted";
    case Criterion::discounted_depreciating: return "discounted_depreciating";
    case Criterion::average: return "average";
    case Criterion::average_depreciating: return "average_depreciating";
  }
  return "?";
}

std::pair<ValueVector, SolveReport> value_iteration_discounted(
    const Mdp& mdp, double lambda, double tol) {
  require_valid_mdp(mdp);
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie in (0,1)");
  auto [v, report] = iterate_to_fixed_point(mdp, lambda, 1.0, tol);
  return {ValueVector{std::move(v), Criterion::discounted, {lambda, 0.0}},
          std::move(report)};
}

std::pair<ValueVector, SolveReport> solve_discounted_depreciating(
    const Mdp& mdp, const DiscountSpec& spec, double tol) {
  require_valid_mdp(mdp);
  spec.require_valid();
  const double scale = 1.0 / (1.0 - spec.lambda * spec.gamma);
  auto [v, report] = iterate_to_fixed_point(mdp, spec.lambda, scale, tol);

  // Self-check against the reduction to the plain discounted problem.
  auto [plain, plain_report] =
      iterate_to_fixed_point(mdp, spec.lambda, 1.0, tol * (1.0 - spec.lambda * spec.gamma));
  (void)plain_report;
  double gap = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s)
    gap = std::max(gap, std::abs(v[s] - plain[s] * scale));
  report.scaling_check_gap = gap;

  return {ValueVector{std::move(v), Criterion::discounted_depreciating, spec},
          std::move(report)};
}

ValueVector policy_evaluation(const Mdp& mdp, const Policy& policy,
                              const DiscountSpec& spec, Criterion criterion) {
  require_valid_mdp(mdp);
  spec.require_valid();
  if (criterion != Criterion::discounted &&
      criterion != Criterion::discounted_depreciating)
    throw std::invalid_argument(
        "policy_evaluation supports the discounted criteria only");
  const int n = mdp.num_states();
  if (static_cast<int>(policy.action_of.size()) != n)
    throw std::invalid_argument("policy size mismatch");
  const double scale = criterion == Criterion::discounted_depreciating
                           ? 1.0 / (1.0 - spec.lambda * spec.gamma)
                           : 1.0;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (int s = 0; s < n; ++s) {
    const int act = policy.action_of[s];
    if (act < 0 || act >= mdp.num_actions(s))
      throw std::invalid_argument("policy action out of range");
    for (int t = 0; t < n; ++t)
      a[s][t] = (s == t ? 1.0 : 0.0) - spec.lambda * mdp.transition[s][act][t];
    b[s] = mdp.reward[s][act] * scale;
  }
  return {detail::solve_dense(std::move(a), std::move(b)), criterion, spec};
}

AverageSolve solve_average(const Mdp& mdp, double tol) {
  require_valid_mdp(mdp);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  require_unichain(mdp);

  // Relative value iteration on the aperiodicity-transformed model
  // T' = (1-tau) I + tau T, which preserves the gain and optimal policies.
  constexpr double kTau = 0.5;
  const int n = mdp.num_states();
  std::vector<double> h(n, 0.0);
  AverageSolve out;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    Policy greedy{std::vector<int>(n, 0)};
    std::vector<double> th(n);
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < mdp.num_actions(s); ++a) {
        const double q = mdp.reward[s][a] + (1.0 - kTau) * h[s] +
                         kTau * expected_value(mdp, s, a, h);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      th[s] = best;
      greedy.action_of[s] = best_a;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
      lo = std::min(lo, th[s] - h[s]);
      hi = std::max(hi, th[s] - h[s]);
    }
    // subtract the reference-state value to keep iterates bounded
    const double ref = th[0];
    for (int s = 0; s < n; ++s) h[s] = th[s] - ref;
    if (hi - lo <= tol) {
      out.gain = 0.5 * (lo + hi);
      out.report.iterations = iter;
      out.report.final_residual = hi - lo;
      out.report.greedy_policy = std::move(greedy);
      return out;
    }
  }
  throw std::runtime_error("relative value iteration failed to converge");
}

std::pair<ValueVector, SolveReport> solve_average_depreciating(
    const Mdp& mdp, double gamma, double tol) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  AverageSolve avg = solve_average(mdp, tol * (1.0 - gamma));
  const double value = avg.gain / (1.0 - gamma);
  return {ValueVector{std::vector<double>(mdp.num_states(), value),
                      Criterion::average_depreciating,
                      {0.5, gamma}},
          std::move(avg.report)};
}

TauberianTable tauberian_probe(const Mdp& mdp, double gamma,
                               std::span<const double> lambda_grid,
                               double tol) {
  if (lambda_grid.empty())
    throw std::invalid_argument("empty lambda grid");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double l = lambda_grid[i];
    if (!(l > 0.0 && l < 1.0 - 1e-6))
      throw std::invalid_argument("lambda grid values must lie in (0, 1-1e-6)");
    if (i > 0 && !(l > lambda_grid[i - 1]))
      throw std::invalid_argument("lambda grid must be strictly increasing");
  }
  TauberianTable table;
  auto [ref, ref_report] = solve_average_depreciating(mdp, gamma, tol);
  (void)ref_report;
  table.reference = ref.values;
  for (double lambda : lambda_grid) {
    auto [v, report] =
        solve_discounted_depreciating(mdp, DiscountSpec{lambda, gamma}, tol);
    (void)report;
    TauberianRow row{lambda, {}};
    row.scaled_values.reserve(v.values.size());
    double gap = 0.0;
    for (std::size_t s = 0; s < v.values.size(); ++s) {
      const double scaled = (1.0 - lambda) * v.values[s];
      row.scaled_values.push_back(scaled);
      gap = std::max(gap, std::abs(scaled - table.reference[s]));
    }
    table.rows.push_back(std::move(row));
    table.gaps.push_back(gap);
  }
  return table;
}

double policy_gain(const Mdp& mdp, const Policy& policy) {
  const auto classes = closed_recurrent_classes(mdp, policy);
  if (classes.empty())
    throw std::runtime_error("no closed recurrent class found");
  if (classes.size() >= 2)
    throw MultichainError("policy induces multiple closed recurrent classes",
                          policy);
  const auto& cls = classes.front();
  const int m = static_cast<int>(cls.size());
  // stationary distribution: mu P = mu, sum mu = 1, restricted to the class
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (int i = 0; i < m - 1; ++i) {
    for (int j = 0; j < m; ++j) {
      const double p = mdp.transition[cls[j]][policy.action_of[cls[j]]][cls[i]];
      a[i][j] = p - (i == j ? 1.0 : 0.0);
    }
  }
  for (int j = 0; j < m; ++j) a[m - 1][j] = 1.0;
  b[m - 1] = 1.0;
  const std::vector<double> mu = detail::solve_dense(std::move(a), std::move(b));
  double gain = 0.0;
  for (int j = 0; j < m; ++j)
    gain += mu[j] * mdp.reward[cls[j]][policy.action_of[cls[j]]];
  return gain;
}

std::pair<ValueVector, Policy> brute_force_optimal(const Mdp& mdp,
                                                   const DiscountSpec& spec,
                                                   Criterion criterion,
                                                   std::uint64_t cap) {
  require_valid_mdp(mdp);
  const auto policies = enumerate_policies(mdp, cap);
  const int n = mdp.num_states();
  std::vector<std::vector<double>> values;
  values.reserve(policies.size());
  for (const Policy& p : policies) {
    switch (criterion) {
      case Criterion::discounted:
      case Criterion::discounted_depreciating:
        values.push_back(policy_evaluation(mdp, p, spec, criterion).values);
        break;
      case Criterion::average:
        values.push_back(std::vector<double>(n, policy_gain(mdp, p)));
        break;
      case Criterion::average_depreciating:
        values.push_back(std::vector<double>(
            n, policy_gain(mdp, p) / (1.0 - spec.gamma)));
        break;
    }
  }
  std::vector<double> vmax(n, -std::numeric_limits<double>::infinity());
  for (const auto& v : values)
    for (int s = 0; s < n; ++s) vmax[s] = std::max(vmax[s], v[s]);

  // lexicographically first policy attaining the per-state maximum
  double scale = 0.0;
  for (double x : vmax) scale = std::max(scale, std::abs(x));
  double best_gap = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double gap = 0.0;
    for (int s = 0; s < n; ++s) gap = std::max(gap, vmax[s] - values[i][s]);
    if (gap < best_gap - 1e-12 * (1.0 + scale)) {
      best_gap = gap;
      best_idx = i;
    }
  }
  return {ValueVector{std::move(vmax), criterion, spec}, policies[best_idx]};
}

}  // namespace deprec
