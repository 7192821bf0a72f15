#include <cmath>

#include "deprec/exact.hpp"
#include "deprec/scenarios.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace deprec;

namespace {

const Mdp& car() {
  static const Mdp mdp = build_car_dealership({0.5, 0.25, 5.0, 7.0});
  return mdp;
}

Mdp single_state(double reward) {
  Mdp mdp;
  mdp.state_names = {"s"};
  mdp.action_names = {{"a"}};
  mdp.transition = {{{1.0}}};
  mdp.reward = {{reward}};
  return mdp;
}

Mdp zero_rewards(Mdp mdp) {
  for (auto& row : mdp.reward)
    for (double& r : row) r = 0.0;
  return mdp;
}

}  // namespace

TEST_CASE("value iteration on the car dealership") {
  const auto [v, report] = value_iteration_discounted(car(), 0.5, 1e-10);
  CHECK(std::abs(v.values[0] - 10.0 / 11.0) <= 1e-10);
  CHECK(report.greedy_policy.action_of[0] == 0);  // a_1 at s_d
  CHECK(std::abs(v.values[1] - 20.0 / 11.0) <= 1e-10);  // s_1
  CHECK(std::abs(v.values[2] - 60.0 / 11.0) <= 1e-10);  // t_1
}

TEST_CASE("value iteration trivial cases") {
  const auto [vz, rz] = value_iteration_discounted(zero_rewards(car()), 0.5, 1e-10);
  for (double x : vz.values) CHECK(x == doctest::Approx(0.0).epsilon(1e-10));

  const auto [v1, r1] = value_iteration_discounted(single_state(3.0), 0.25, 1e-10);
  CHECK(std::abs(v1.values[0] - 3.0 / 0.75) <= 1e-9);
}

TEST_CASE("discounted depreciating solve on the car dealership") {
  const DiscountSpec spec{0.5, 0.5};
  const auto [v, report] = solve_discounted_depreciating(car(), spec, 1e-10);
  CHECK(std::abs(v.values[0] - 40.0 / 33.0) <= 1e-9);
  CHECK(report.greedy_policy.action_of[0] == 0);
  CHECK(report.scaling_check_gap <= 2e-10);
}

TEST_CASE("depreciating solve at gamma zero equals plain value iteration") {
  const double tol = 1e-10;
  const auto [dep, r1] =
      solve_discounted_depreciating(car(), DiscountSpec{0.5, 0.0}, tol);
  const auto [plain, r2] = value_iteration_discounted(car(), 0.5, tol);
  for (int s = 0; s < car().num_states(); ++s)
    CHECK(std::abs(dep.values[s] - plain.values[s]) <= 2 * tol);
}

TEST_CASE("single self-loop depreciating closed form") {
  const DiscountSpec spec{0.5, 0.5};
  const auto [v, report] =
      solve_discounted_depreciating(single_state(2.0), spec, 1e-10);
  CHECK(std::abs(v.values[0] - 2.0 / ((1 - 0.25) * (1 - 0.5))) <= 1e-9);
}

TEST_CASE("policy evaluation hand-solved values") {
  SUBCASE("a_2 route, discounted") {
    Policy a2{{1, 0, 0, 0, 0}};
    const auto v = policy_evaluation(car(), a2, {0.5, 0.0}, Criterion::discounted);
    CHECK(std::abs(v.values[0] - 14.0 / 19.0) <= 1e-12);
  }
  SUBCASE("a_1 route, depreciating") {
    Policy a1{{0, 0, 0, 0, 0}};
    const auto v = policy_evaluation(car(), a1, {0.5, 0.5},
                                     Criterion::discounted_depreciating);
    CHECK(std::abs(v.values[2] - 80.0 / 11.0) <= 1e-12);  // t_1
    CHECK(std::abs(v.values[0] - 40.0 / 33.0) <= 1e-12);
  }
  SUBCASE("zero rewards give the zero vector") {
    Policy a1{{0, 0, 0, 0, 0}};
    const auto v = policy_evaluation(zero_rewards(car()), a1, {0.5, 0.5},
                                     Criterion::discounted_depreciating);
    for (double x : v.values) CHECK(x == 0.0);
  }
}

TEST_CASE("average solve") {
  SUBCASE("car dealership gain and greedy action") {
    const AverageSolve avg = solve_average(car(), 1e-10);
    CHECK(std::abs(avg.gain - 1.25) <= 1e-9);
    CHECK(avg.report.greedy_policy.action_of[0] == 0);
  }
  SUBCASE("periodic 3-4-5 gain") {
    const Mdp chain = build_periodic_chain(std::vector<double>{3, 4, 5});
    CHECK(std::abs(solve_average(chain, 1e-10).gain - 4.0) <= 1e-9);
  }
  SUBCASE("single absorbing state") {
    CHECK(std::abs(solve_average(single_state(2.5), 1e-10).gain - 2.5) <= 1e-9);
  }
  SUBCASE("multichain rejection with witness") {
    Mdp mdp;
    mdp.state_names = {"u", "w"};
    mdp.action_names = {{"a"}, {"a"}};
    mdp.transition = {{{1.0, 0.0}}, {{0.0, 1.0}}};  // two absorbing loops
    mdp.reward = {{1.0}, {2.0}};
    CHECK_THROWS_AS(solve_average(mdp, 1e-8), MultichainError);
  }
}

TEST_CASE("average depreciating solve") {
  SUBCASE("car dealership") {
    const auto [v, report] = solve_average_depreciating(car(), 0.5, 1e-10);
    for (double x : v.values) CHECK(std::abs(x - 2.5) <= 1e-9);
  }
  SUBCASE("periodic 3-4-5 at gamma one half") {
    const Mdp chain = build_periodic_chain(std::vector<double>{3, 4, 5});
    const auto [v, report] = solve_average_depreciating(chain, 0.5, 1e-10);
    CHECK(std::abs(v.values[0] - 8.0) <= 1e-9);
  }
  SUBCASE("zero rewards") {
    const auto [v, report] =
        solve_average_depreciating(zero_rewards(car()), 0.7, 1e-10);
    for (double x : v.values) CHECK(std::abs(x) <= 1e-9);
  }
}

TEST_CASE("tauberian probe") {
  SUBCASE("car at lambda 0.9999") {
    const std::vector<double> grid{0.9999};
    const auto table = tauberian_probe(car(), 0.5, grid, 1e-4);
    CHECK(std::abs(table.rows[0].scaled_values[0] - 2.5) <= 0.01);
  }
  SUBCASE("zero rewards give all-zero rows") {
    const std::vector<double> grid{0.9, 0.99};
    const auto table = tauberian_probe(zero_rewards(car()), 0.5, grid, 1e-6);
    for (const auto& row : table.rows)
      for (double v : row.scaled_values) CHECK(std::abs(v) <= 1e-6);
  }
  SUBCASE("gap decreases along the default grid on the car instance") {
    const std::vector<double> grid{0.9, 0.99, 0.999, 0.9999};
    const auto table = tauberian_probe(car(), 0.5, grid, 1e-5);
    for (std::size_t i = 1; i < table.gaps.size(); ++i)
      CHECK(table.gaps[i] < table.gaps[i - 1]);
  }
  SUBCASE("rejects lambda too close to 1 and non-increasing grids") {
    CHECK_THROWS(tauberian_probe(car(), 0.5, std::vector<double>{1.0 - 1e-7}, 1e-4));
    CHECK_THROWS(tauberian_probe(car(), 0.5, std::vector<double>{0.9, 0.5}, 1e-4));
  }
}

TEST_CASE("brute force optimal") {
  SUBCASE("car dealership depreciating") {
    const auto [v, policy] = brute_force_optimal(
        car(), {0.5, 0.5}, Criterion::discounted_depreciating);
    CHECK(std::abs(v.values[0] - 40.0 / 33.0) <= 1e-12);
    CHECK(policy.action_of[0] == 0);
  }
  SUBCASE("one-policy MDP equals policy evaluation") {
    const Mdp chain = build_periodic_chain(std::vector<double>{3, 4, 5});
    const auto [v, policy] = brute_force_optimal(
        chain, {0.5, 0.5}, Criterion::discounted_depreciating);
    const auto pe = policy_evaluation(chain, policy, {0.5, 0.5},
                                      Criterion::discounted_depreciating);
    for (int s = 0; s < chain.num_states(); ++s)
      CHECK(v.values[s] == doctest::Approx(pe.values[s]).epsilon(1e-12));
    CHECK(std::abs(v.values[0] - 200.0 / 21.0) <= 1e-9);
  }
  SUBCASE("matches the fixed-point solver on random MDPs") {
    const double tol = 1e-9;
    for (int seedval = 0; seedval < 100; ++seedval) {
      RngState gen{static_cast<std::uint64_t>(seedval), 0};
      const Mdp mdp = testutil::random_mdp(gen, 3, 2);
      const DiscountSpec spec{0.3 + 0.5 * gen.next_unit(),
                              0.9 * gen.next_unit()};
      const auto [bf, bf_policy] =
          brute_force_optimal(mdp, spec, Criterion::discounted_depreciating);
      const auto [vi, report] = solve_discounted_depreciating(mdp, spec, tol);
      for (int s = 0; s < mdp.num_states(); ++s)
        CHECK(std::abs(bf.values[s] - vi.values[s]) <= 2 * tol);
    }
  }
}

TEST_CASE("scaling identity on random MDPs") {
  const double tol = 1e-9;
  RngState gen{2024, 0};
  for (int trial = 0; trial < 200; ++trial) {
    const int ns = 2 + gen.next_index(5);   // |S| <= 6
    const int na = 1 + gen.next_index(3);   // |A| <= 3
    const Mdp mdp = testutil::random_mdp(gen, ns, na);
    const double lambda = 0.1 + 0.85 * gen.next_unit();
    const double gamma = 0.95 * gen.next_unit();
    const DiscountSpec spec{lambda, gamma};
    const double scale = 1.0 / (1.0 - lambda * gamma);

    const auto [dep, dep_report] = solve_discounted_depreciating(mdp, spec, tol);
    const auto [plain, plain_report] =
        value_iteration_discounted(mdp, lambda, tol / scale);
    double worst_gap = 0.0;
    for (int s = 0; s < ns; ++s)
      worst_gap = std::max(worst_gap,
                           std::abs(dep.values[s] - plain.values[s] * scale));
    CHECK(worst_gap <= 2 * tol);

    // argmax invariance wherever the runner-up action gap exceeds 10*tol
    for (int s = 0; s < ns; ++s) {
      double best = -1e300, second = -1e300;
      for (int a = 0; a < mdp.num_actions(s); ++a) {
        double q = mdp.reward[s][a] * scale;
        for (int t = 0; t < ns; ++t)
          q += lambda * mdp.transition[s][a][t] * dep.values[t];
        if (q > best) {
          second = best;
          best = q;
        } else if (q > second) {
          second = q;
        }
      }
      if (mdp.num_actions(s) > 1 && best - second > 10 * tol)
        CHECK(dep_report.greedy_policy.action_of[s] ==
              plain_report.greedy_policy.action_of[s]);
    }
  }
}

TEST_CASE("gamma to 1 limit on the car instance") {
  const double lambda = 0.5;
  const double gamma = 1.0 - 1e-6;
  const auto [dep, r1] =
      solve_discounted_depreciating(car(), DiscountSpec{lambda, gamma}, 1e-10);
  const auto [plain, r2] = value_iteration_discounted(car(), lambda, 1e-10);
  for (int s = 0; s < car().num_states(); ++s) {
    const double limit = plain.values[s] / (1.0 - lambda);
    CHECK(std::abs(dep.values[s] - limit) <= 1e-3 * std::abs(limit));
  }
}

TEST_CASE("tauberian bound on random unichain MDPs") {
  for (int seedval = 0; seedval < 5; ++seedval) {
    RngState gen{static_cast<std::uint64_t>(1000 + seedval), 0};
    const Mdp mdp = testutil::random_mdp(gen, 3, 2);
    const double gamma = 0.5;
    const auto [ref, ref_report] = solve_average_depreciating(mdp, gamma, 1e-9);
    auto gap_at = [&](double lambda) {
      const auto [v, report] =
          solve_discounted_depreciating(mdp, DiscountSpec{lambda, gamma}, 1e-7);
      double g = 0.0;
      for (int s = 0; s < mdp.num_states(); ++s)
        g = std::max(g, std::abs((1 - lambda) * v.values[s] - ref.values[s]));
      return g;
    };
    const double coarse = gap_at(1.0 - 1e-2);
    const double fine = gap_at(1.0 - 1e-4);
    double vnorm = 0.0;
    for (double x : ref.values) vnorm = std::max(vnorm, std::abs(x));
    CHECK(fine <= 10.0 * coarse + 1e-12);
    CHECK(fine <= 0.02 * (1.0 + vnorm));
  }
}
