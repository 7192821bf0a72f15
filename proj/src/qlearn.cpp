#include "deprec/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace deprec {

QTable QTable::zeros(const Mdp& mdp) {
  QTable t;
  t.q.resize(mdp.num_states());
  t.visits.resize(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) {
    t.q[s].assign(mdp.num_actions(s), 0.0);
    t.visits[s].assign(mdp.num_actions(s), 0);
  }
  return t;
}

double QTable::max_at(int s) const {
  double best = -std::numeric_limits<double>::infinity();
  for (double x : q[s]) best = std::max(best, x);
  return best;
}

double QTable::sup_gap(const QTable& other) const {
  double gap = 0.0;
  for (std::size_t s = 0; s < q.size(); ++s)
    for (std::size_t a = 0; a < q[s].size(); ++a)
      gap = std::max(gap, std::abs(q[s][a] - other.q[s][a]));
  return gap;
}

LearningRateSchedule LearningRateSchedule::harmonic(double c, double n0,
                                                    Counting counting) {
  LearningRateSchedule s;
  s.kind = Kind::harmonic;
  s.c = c;
  s.n0 = n0;
  s.counting = counting;
  return s;
}

LearningRateSchedule LearningRateSchedule::polynomial(double c, double n0,
                                                      double p,
                                                      Counting counting) {
  LearningRateSchedule s;
  s.kind = Kind::polynomial;
  s.c = c;
  s.n0 = n0;
  s.p = p;
  s.counting = counting;
  return s;
}

void LearningRateSchedule::require_valid() const {
  if (!(c > 0.0) || !(n0 >= 0.0))
    throw std::invalid_argument("learning rate constants must satisfy c > 0, n0 >= 0");
  if (allow_nonconvergent) return;
  switch (kind) {
    case Kind::harmonic:
      break;  // sum 1/n diverges, sum 1/n^2 converges
    case Kind::polynomial:
      if (!(p > 0.5 && p <= 1.0))
        throw std::invalid_argument(
            "polynomial exponent must lie in (0.5, 1] for convergence");
      break;
    case Kind::constant:
      throw std::invalid_argument(
          "constant rates violate the square-summability condition");
  }
}

double LearningRateSchedule::rate(long n) const {
  double alpha;
  switch (kind) {
    case Kind::harmonic: alpha = c / (static_cast<double>(n) + n0); break;
    case Kind::polynomial:
      alpha = c / std::pow(static_cast<double>(n) + n0, p);
      break;
    case Kind::constant: alpha = c; break;
    default: alpha = 0.0;
  }
  return std::clamp(alpha, 0.0, 1.0);
}

void ExplorationSchedule::require_valid() const {
  if (!(eps_min > 0.0 && eps_min <= 1.0))
    throw std::invalid_argument("eps_min must lie in (0,1]");
  if (!(eps0 >= 0.0 && eps0 <= 1.0) || !(decay > 0.0 && decay <= 1.0))
    throw std::invalid_argument("invalid exploration parameters");
}

double ExplorationSchedule::epsilon(long n) const {
  return std::max(eps_min, eps0 * std::pow(decay, static_cast<double>(n)));
}

void q_update(QTable& q, int s, int a, double r, int next_state, double alpha,
              const DiscountSpec& spec) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0,1]");
  spec.require_valid();
  if (s < 0 || static_cast<std::size_t>(s) >= q.q.size() || a < 0 ||
      static_cast<std::size_t>(a) >= q.q[s].size() || next_state < 0 ||
      static_cast<std::size_t>(next_state) >= q.q.size())
    throw std::out_of_range("q_update index out of range");
  const double target =
      r / (1.0 - spec.lambda * spec.gamma) + spec.lambda * q.max_at(next_state);
  q.q[s][a] += alpha * (target - q.q[s][a]);
  ++q.visits[s][a];
}

Policy greedy_policy_of(const QTable& q) {
  Policy policy{std::vector<int>(q.q.size(), 0)};
  for (std::size_t s = 0; s < q.q.size(); ++s) {
    int best = 0;
    for (std::size_t a = 1; a < q.q[s].size(); ++a)
      if (q.q[s][a] > q.q[s][best]) best = static_cast<int>(a);
    policy.action_of[s] = best;
  }
  return policy;
}

std::pair<QTable, QLearnReport> run_q_learning(
    const Mdp& mdp, const DiscountSpec& spec, const LearningRateSchedule& lr,
    const ExplorationSchedule& explore, long steps, RngState rng,
    const QTable* reference, std::optional<double> optimistic_init) {
  spec.require_valid();
  lr.require_valid();
  explore.require_valid();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  auto violations = validate_mdp(mdp);
  if (!violations.empty())
    throw std::invalid_argument("invalid MDP: " + violations.front());

  QTable table = QTable::zeros(mdp);
  if (optimistic_init)
    for (auto& row : table.q) std::fill(row.begin(), row.end(), *optimistic_init);

  QLearnReport report;
  report.communicating = is_communicating(mdp);

  int state = rng.next_index(mdp.num_states());
  double episode_return = 0.0;
  long global_n = 0;

  for (long step = 1; step <= steps; ++step) {
    const double eps = explore.epsilon(step);
    int action;
    if (rng.next_unit() < eps) {
      action = rng.next_index(mdp.num_actions(state));
    } else {
      action = 0;
      for (int a = 1; a < mdp.num_actions(state); ++a)
        if (table.q[state][a] > table.q[state][action]) action = a;
    }
    const StepResult sr = sample_step(mdp, state, action, rng);
    ++global_n;
    const long n = lr.counting == LearningRateSchedule::Counting::per_visit
                       ? table.visits[state][action] + 1
                       : global_n;
    const double alpha = lr.rate(n);
    q_update(table, state, action, sr.reward, sr.next_state, alpha, spec);
    episode_return += sr.reward;
    state = sr.next_state;

    if (step % kRestartInterval == 0) {
      report.episode_returns.push_back(episode_return);
      episode_return = 0.0;
      state = rng.next_index(mdp.num_states());
    }
    if (step % kTraceInterval == 0 || step == steps) {
      const double gap = reference
                             ? table.sup_gap(*reference)
                             : std::numeric_limits<double>::quiet_NaN();
      report.trace.push_back({step, gap, eps, alpha});
    }
  }

  report.steps = steps;
  report.final_gap = reference ? table.sup_gap(*reference) : 0.0;
  report.greedy = greedy_policy_of(table);
  return {std::move(table), std::move(report)};
}

QTable exact_q_table(const Mdp& mdp, const DiscountSpec& spec,
                     const ValueVector& v) {
  if (v.criterion != Criterion::discounted_depreciating)
    throw std::invalid_argument(
        "exact_q_table expects a discounted-depreciating value vector");
  if (v.values.size() != static_cast<std::size_t>(mdp.num_states()))
    throw std::invalid_argument("value vector size mismatch");
  const double scale = 1.0 / (1.0 - spec.lambda * spec.gamma);
  QTable table = QTable::zeros(mdp);
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      double expect = 0.0;
      for (int t = 0; t < mdp.num_states(); ++t)
        expect += mdp.transition[s][a][t] * v.values[t];
      table.q[s][a] = mdp.reward[s][a] * scale + spec.lambda * expect;
    }
  return table;
}

std::string qlearn_trace_csv(const QLearnReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "step,sup_gap,epsilon,alpha_example\n";
  for (const auto& row : report.trace)
    out << row.step << "," << row.sup_gap << "," << row.epsilon << ","
        << row.alpha_example << "\n";
  return out.str();
}

}  // namespace deprec
