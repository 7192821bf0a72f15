#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace deprec {

// Counter-based generator: output depends only on (seed, counter), so
// sequences are reproducible across runs and platforms.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  std::uint64_t next_u64();
  double next_unit();        // uniform in [0, 1)
  int next_index(int n);     // uniform in {0, ..., n-1}
};

// Finite MDP with per-state action sets. Indices are positions in the
// declared state/action orderings.
struct Mdp {
  std::vector<std::string> state_names;
  std::vector<std::vector<std::string>> action_names;        // [s]
  std::vector<std::vector<std::vector<double>>> transition;  // [s][a][t]
  std::vector<std::vector<double>> reward;                   // [s][a]
  std::string title;

  int num_states() const { return static_cast<int>(state_names.size()); }
  int num_actions(int s) const { return static_cast<int>(action_names[s].size()); }

  double min_reward() const;
  double max_reward() const;
  double max_abs_reward() const;

  int state_index(const std::string& name) const;            // -1 if absent
  int action_index(int s, const std::string& name) const;    // -1 if absent
};

// Stationary deterministic policy: one action index per state.
struct Policy {
  std::vector<int> action_of;

  bool operator==(const Policy&) const = default;
};

struct TrajectoryStep {
  int state;
  int action;
  double reward;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::uint64_t rng_seed = 0;
};

// Empty report iff the MDP satisfies all structural invariants: rows sum to 1
// within 1e-9, probabilities in [0,1], finite rewards, no empty action set.
std::vector<std::string> validate_mdp(const Mdp& mdp);

inline constexpr double kRowSumTolerance = 1e-9;

struct StepResult {
  int next_state;
  double reward;
};

// Draws the successor by inverse CDF over T(.|s,a) in declared state order.
StepResult sample_step(const Mdp& mdp, int state, int action, RngState& rng);

Trajectory sample_trajectory(const Mdp& mdp, int start, const Policy& policy,
                             int steps, RngState& rng);

// All stationary deterministic policies in lexicographic order. Throws if the
// policy count exceeds the cap.
std::vector<Policy> enumerate_policies(const Mdp& mdp,
                                       std::uint64_t cap = 1000000);

std::uint64_t count_policies(const Mdp& mdp);

// Closed recurrent classes of the chain induced by a policy (SCCs of the
// support graph with no outgoing edge).
std::vector<std::vector<int>> closed_recurrent_classes(const Mdp& mdp,
                                                       const Policy& policy);

// True when the union support graph over all actions is strongly connected.
bool is_communicating(const Mdp& mdp);

}  // namespace deprec
