#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deprec/exact.hpp"
#include "deprec/mdp.hpp"
#include "deprec/payoff.hpp"

namespace deprec {

struct QTable {
  std::vector<std::vector<double>> q;       // [s][a]
  std::vector<std::vector<long>> visits;    // [s][a]

  static QTable zeros(const Mdp& mdp);
  double max_at(int s) const;
  double sup_gap(const QTable& other) const;
};

struct LearningRateSchedule {
  enum class Kind { harmonic, polynomial, constant };
  enum class Counting { global_step, per_visit };

  Kind kind = Kind::harmonic;
  double c = 1.0;
  double n0 = 0.0;
  double p = 1.0;  // exponent for the polynomial kind, in (0.5, 1]
  Counting counting = Counting::per_visit;
  bool allow_nonconvergent = false;

  static LearningRateSchedule harmonic(double c = 1.0, double n0 = 0.0,
                                       Counting counting = Counting::per_visit);
  static LearningRateSchedule polynomial(double c, double n0, double p,
                                         Counting counting = Counting::per_visit);

  // Rejects parameterizations violating the Robbins-Monro conditions unless
  // allow_nonconvergent is set.
  void require_valid() const;

  double rate(long n) const;  // n counts from 1
};

struct ExplorationSchedule {
  double eps0 = 1.0;
  double decay = 1.0;
  double eps_min = 0.05;

  void require_valid() const;
  double epsilon(long n) const;
};

struct QLearnTraceRow {
  long step;
  double sup_gap;  // NaN when no reference table was given
  double epsilon;
  double alpha_example;
};

struct QLearnReport {
  long steps = 0;
  double final_gap = 0.0;  // sup-norm gap to the reference, when provided
  Policy greedy;
  std::vector<double> episode_returns;  // undiscounted return per restart interval
  std::vector<QLearnTraceRow> trace;
  bool communicating = true;
};

// Depreciation-adjusted update:
//   Q(s,a) += alpha * (r/(1-lambda*gamma) + lambda * max_b Q(t,b) - Q(s,a)).
void q_update(QTable& q, int s, int a, double r, int next_state, double alpha,
              const DiscountSpec& spec);

inline constexpr long kRestartInterval = 10000;
inline constexpr long kTraceInterval = 100000;

std::pair<QTable, QLearnReport> run_q_learning(
    const Mdp& mdp, const DiscountSpec& spec, const LearningRateSchedule& lr,
    const ExplorationSchedule& explore, long steps, RngState rng,
    const QTable* reference = nullptr,
    std::optional<double> optimistic_init = std::nullopt);

// Q(s,a) = R(s,a)/(1-lambda*gamma) + lambda E_T[v]; v must come from
// solve_discounted_depreciating for the same (mdp, spec).
QTable exact_q_table(const Mdp& mdp, const DiscountSpec& spec,
                     const ValueVector& v);

Policy greedy_policy_of(const QTable& q);

// CSV with columns step,sup_gap,epsilon,alpha_example.
std::string qlearn_trace_csv(const QLearnReport& report);

}  // namespace deprec
