#include "deprec/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deprec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_indices(const Mdp& mdp, int state, int action) {
  if (state < 0 || state >= mdp.num_states())
    throw std::out_of_range("state index out of range");
  if (action < 0 || action >= mdp.num_actions(state))
    throw std::out_of_range("action index out of range");
}

}  // namespace

std::uint64_t RngState::next_u64() {
  ++counter;
  return splitmix64(seed ^ splitmix64(counter));
}

double RngState::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RngState::next_index(int n) {
  if (n <= 0) throw std::invalid_argument("next_index: n must be positive");
  return static_cast<int>(next_unit() * n) % n;
}

double Mdp::min_reward() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : reward)
    for (double r : row) m = std::min(m, r);
  return m;
}

double Mdp::max_reward() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& row : reward)
    for (double r : row) m = std::max(m, r);
  return m;
}

double Mdp::max_abs_reward() const {
  return std::max(std::abs(min_reward()), std::abs(max_reward()));
}

int Mdp::state_index(const std::string& name) const {
  for (int s = 0; s < num_states(); ++s)
    if (state_names[s] == name) return s;
  return -1;
}

int Mdp::action_index(int s, const std::string& name) const {
  for (int a = 0; a < num_actions(s); ++a)
    if (action_names[s][a] == name) return a;
  return -1;
}

std::vector<std::string> validate_mdp(const Mdp& mdp) {
  std::vector<std::string> report;
  const int n = mdp.num_states();
  if (n < 1) {
    report.push_back("mdp has no states");
    return report;
  }
  if (mdp.action_names.size() != static_cast<std::size_t>(n) ||
      mdp.transition.size() != static_cast<std::size_t>(n) ||
      mdp.reward.size() != static_cast<std::size_t>(n)) {
    report.push_back("per-state tables do not match the state count");
    return report;
  }
  for (int s = 0; s < n; ++s) {
    const int na = mdp.num_actions(s);
    if (na < 1)
      report.push_back("empty action set at state " + mdp.state_names[s]);
    if (mdp.transition[s].size() != static_cast<std::size_t>(na) ||
        mdp.reward[s].size() != static_cast<std::size_t>(na)) {
      report.push_back("table shape mismatch at state " + mdp.state_names[s]);
      continue;
    }
    for (int a = 0; a < na; ++a) {
      const std::string where =
          "(" + mdp.state_names[s] + ", " + mdp.action_names[s][a] + ")";
      if (!std::isfinite(mdp.reward[s][a]))
        report.push_back("non-finite reward at " + where);
      const auto& row = mdp.transition[s][a];
      if (row.size() != static_cast<std::size_t>(n)) {
        report.push_back("transition row width mismatch at " + where);
        continue;
      }
      double sum = 0.0;
      for (int t = 0; t < n; ++t) {
        const double p = row[t];
        if (!(p >= 0.0))
          report.push_back("negative-probability entry at " + where + " -> " +
                           mdp.state_names[t]);
        else if (p > 1.0)
          report.push_back("probability above 1 at " + where + " -> " +
                           mdp.state_names[t]);
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        report.push_back("row-sum violation at " + where + ": sum = " +
                         std::to_string(sum));
    }
  }
  return report;
}

StepResult sample_step(const Mdp& mdp, int state, int action, RngState& rng) {
  check_indices(mdp, state, action);
  const auto& row = mdp.transition[state][action];
  const double u = rng.next_unit();
  double cum = 0.0;
  int chosen = -1;
  for (int t = 0; t < mdp.num_states(); ++t) {
    if (row[t] <= 0.0) continue;
    cum += row[t];
    chosen = t;
    if (u < cum) break;
  }
  if (chosen < 0) throw std::invalid_argument("all-zero transition row");
  return {chosen, mdp.reward[state][action]};
}

Trajectory sample_trajectory(const Mdp& mdp, int start, const Policy& policy,
                             int steps, RngState& rng) {
  Trajectory traj;
  traj.rng_seed = rng.seed;
  traj.steps.reserve(steps);
  int s = start;
  for (int k = 0; k < steps; ++k) {
    const int a = policy.action_of.at(s);
    const StepResult r = sample_step(mdp, s, a, rng);
    traj.steps.push_back({s, a, r.reward});
    s = r.next_state;
  }
  return traj;
}

std::uint64_t count_policies(const Mdp& mdp) {
  std::uint64_t count = 1;
  for (int s = 0; s < mdp.num_states(); ++s) {
    const std::uint64_t na = static_cast<std::uint64_t>(mdp.num_actions(s));
    if (na == 0) return 0;
    if (count > std::numeric_limits<std::uint64_t>::max() / na)
      return std::numeric_limits<std::uint64_t>::max();
    count *= na;
  }
  return count;
}

std::vector<Policy> enumerate_policies(const Mdp& mdp, std::uint64_t cap) {
  const std::uint64_t total = count_policies(mdp);
  if (total > cap)
    throw std::invalid_argument("policy enumeration cap exceeded: " +
                                std::to_string(total) + " > " +
                                std::to_string(cap));
  const int n = mdp.num_states();
  std::vector<Policy> out;
  out.reserve(total);
  Policy current{std::vector<int>(n, 0)};
  for (std::uint64_t i = 0; i < total; ++i) {
    out.push_back(current);
    // mixed-radix increment, last state fastest
    for (int s = n - 1; s >= 0; --s) {
      if (++current.action_of[s] < mdp.num_actions(s)) break;
      current.action_of[s] = 0;
    }
  }
  return out;
}

namespace {

// Kosaraju SCCs over an adjacency list.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> radj(n);
  for (int u = 0; u < n; ++u)
    for (int v : adj[u]) radj[v].push_back(u);

  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
    seen[start] = 1;
    while (!stack.empty()) {
      auto& [u, i] = stack.back();
      if (i < adj[u].size()) {
        const int v = adj[u][i++];
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back({v, 0});
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }

  std::vector<std::vector<int>> components;
  std::vector<char> assigned(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (assigned[*it]) continue;
    components.emplace_back();
    std::vector<int> stack{*it};
    assigned[*it] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      components.back().push_back(u);
      for (int v : radj[u])
        if (!assigned[v]) {
          assigned[v] = 1;
          stack.push_back(v);
        }
    }
  }
  return components;
}

}  // namespace

std::vector<std::vector<int>> closed_recurrent_classes(const Mdp& mdp,
                                                       const Policy& policy) {
  const int n = mdp.num_states();
  std::vector<std::vector<int>> adj(n);
  for (int s = 0; s < n; ++s) {
    const auto& row = mdp.transition[s][policy.action_of.at(s)];
    for (int t = 0; t < n; ++t)
      if (row[t] > 0.0) adj[s].push_back(t);
  }
  std::vector<std::vector<int>> closed;
  for (auto& comp : strongly_connected_components(adj)) {
    std::vector<char> in_comp(n, 0);
    for (int u : comp) in_comp[u] = 1;
    bool leaves = false;
    for (int u : comp)
      for (int v : adj[u])
        if (!in_comp[v]) leaves = true;
    if (!leaves) {
      std::sort(comp.begin(), comp.end());
      closed.push_back(std::move(comp));
    }
  }
  return closed;
}

bool is_communicating(const Mdp& mdp) {
  const int n = mdp.num_states();
  std::vector<std::vector<int>> adj(n);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      for (int t = 0; t < n; ++t)
        if (mdp.transition[s][a][t] > 0.0) adj[s].push_back(t);
  return strongly_connected_components(adj).size() == 1;
}

}  // namespace deprec
