#pragma once

#include <span>

#include "deprec/mdp.hpp"

namespace deprec {

// Two candidate markets with success rates rho1/rho2 and car values r1/r2.
struct CarDealershipParams {
  double rho1 = 0.5;
  double rho2 = 0.25;
  double r1 = 5.0;
  double r2 = 7.0;
};

// Five states s_d, s_1, t_1, s_2, t_2. Only s_d offers a choice (a_1 or a_2);
// s_i waits with probability 1-rho_i, t_i returns to s_d paying r_i.
Mdp build_car_dealership(const CarDealershipParams& params);

// Deterministic cycle over n states; state k pays rewards[k], so the reward
// stream from state 0 repeats the input periodically.
Mdp build_periodic_chain(std::span<const double> rewards);

}  // namespace deprec
