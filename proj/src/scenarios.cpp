#include "deprec/scenarios.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deprec {

Mdp build_car_dealership(const CarDealershipParams& params) {
  if (!(params.rho1 > 0.0 && params.rho1 <= 1.0) ||
      !(params.rho2 > 0.0 && params.rho2 <= 1.0))
    throw std::invalid_argument("success probabilities must lie in (0,1]");
  if (!(std::isfinite(params.r1) && params.r1 >= 0.0) ||
      !(std::isfinite(params.r2) && params.r2 >= 0.0))
    throw std::invalid_argument("car values must be finite and nonnegative");

  Mdp mdp;
  mdp.title = "car-dealership";
  mdp.state_names = {"s_d", "s_1", "t_1", "s_2", "t_2"};
  const int s_d = 0, s_1 = 1, t_1 = 2, s_2 = 3, t_2 = 4;
  mdp.action_names = {{"a_1", "a_2"}, {"a"}, {"a"}, {"a"}, {"a"}};
  mdp.transition.assign(5, {});
  mdp.reward.assign(5, {});
  auto row = [&](int to, double p) {
    std::vector<double> r(5, 0.0);
    r[to] = p;
    return r;
  };
  auto two = [&](int to1, double p1, int to2, double p2) {
    std::vector<double> r(5, 0.0);
    r[to1] = p1;
    r[to2] = p2;
    return r;
  };
  mdp.transition[s_d] = {row(s_1, 1.0), row(s_2, 1.0)};
  mdp.reward[s_d] = {0.0, 0.0};
  mdp.transition[s_1] = {two(s_1, 1.0 - params.rho1, t_1, params.rho1)};
  mdp.reward[s_1] = {0.0};
  mdp.transition[t_1] = {row(s_d, 1.0)};
  mdp.reward[t_1] = {params.r1};
  mdp.transition[s_2] = {two(s_2, 1.0 - params.rho2, t_2, params.rho2)};
  mdp.reward[s_2] = {0.0};
  mdp.transition[t_2] = {row(s_d, 1.0)};
  mdp.reward[t_2] = {params.r2};
  return mdp;
}

Mdp build_periodic_chain(std::span<const double> rewards) {
  if (rewards.empty())
    throw std::invalid_argument("periodic chain needs at least one reward");
  const int n = static_cast<int>(rewards.size());
  Mdp mdp;
  mdp.title = "periodic-chain";
  for (int k = 0; k < n; ++k) mdp.state_names.push_back("c" + std::to_string(k));
  mdp.action_names.assign(n, {"a"});
  mdp.transition.assign(n, {std::vector<double>(n, 0.0)});
  mdp.reward.assign(n, {0.0});
  for (int k = 0; k < n; ++k) {
    mdp.transition[k][0][(k + 1) % n] = 1.0;
    mdp.reward[k][0] = rewards[k];
  }
  return mdp;
}

}  // namespace deprec
