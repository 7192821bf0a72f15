#include <cmath>

#include "deprec/exact.hpp"
#include "deprec/lp.hpp"
#include "deprec/scenarios.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace deprec;

namespace {

LpInstance one_var(Sense sense, Relation rel, double rhs) {
  LpInstance lp;
  lp.sense = sense;
  lp.objective = {1.0};
  lp.nonneg = {false};
  lp.rows = {{1.0}};
  lp.rhs = {rhs};
  lp.relations = {rel};
  return lp;
}

const Mdp& car() {
  static const Mdp mdp = build_car_dealership({0.5, 0.25, 5.0, 7.0});
  return mdp;
}

}  // namespace

TEST_CASE("simplex basics") {
  SUBCASE("minimize x subject to x >= 3") {
    const LpSolution sol = simplex_solve(one_var(Sense::minimize, Relation::ge, 3.0));
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.point[0] == doctest::Approx(3.0));
    CHECK(sol.objective == doctest::Approx(3.0));
  }
  SUBCASE("maximize x subject to x >= 3 is unbounded") {
    const LpSolution sol = simplex_solve(one_var(Sense::maximize, Relation::ge, 3.0));
    CHECK(sol.status == LpStatus::unbounded);
  }
  SUBCASE("x >= 3 and x <= 2 is infeasible") {
    LpInstance lp = one_var(Sense::minimize, Relation::ge, 3.0);
    lp.rows.push_back({1.0});
    lp.rhs.push_back(2.0);
    lp.relations.push_back(Relation::le);
    CHECK(simplex_solve(lp).status == LpStatus::infeasible);
  }
}

TEST_CASE("primal LP on a single self-loop state") {
  Mdp mdp;
  mdp.state_names = {"s"};
  mdp.action_names = {{"a"}};
  mdp.transition = {{{1.0}}};
  mdp.reward = {{2.0}};
  const DiscountSpec spec{0.5, 0.5};
  const std::vector<double> weights{1.0};
  const LpSolution sol = simplex_solve(build_primal_lp(mdp, spec, weights));
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.point[0] == doctest::Approx(2.0 / ((1 - 0.5) * (1 - 0.25))));

  const LpSolution dual = simplex_solve(build_dual_lp(mdp, spec, weights));
  REQUIRE(dual.status == LpStatus::optimal);
  CHECK(dual.point[0] == doctest::Approx(1.0 / 0.5));  // y (1 - lambda) = 1
  CHECK(dual.objective == doctest::Approx(sol.objective).epsilon(1e-9));
}

TEST_CASE("car dealership LP matches the fixed-point solver") {
  const DiscountSpec spec{0.5, 0.5};
  const std::vector<double> weights(5, 1.0);
  const LpSolution primal = simplex_solve(build_primal_lp(car(), spec, weights));
  REQUIRE(primal.status == LpStatus::optimal);
  CHECK(std::abs(primal.point[0] - 40.0 / 33.0) <= 1e-6);

  const LpSolution dual = simplex_solve(build_dual_lp(car(), spec, weights));
  REQUIRE(dual.status == LpStatus::optimal);
  double primal_sum = 0.0;
  for (double v : primal.point) primal_sum += v;
  CHECK(std::abs(dual.objective - primal_sum) <= 1e-6 * (1 + std::abs(primal_sum)));

  const Policy policy = policy_from_dual(car(), dual);
  CHECK(policy.action_of[0] == 0);  // a_1 at s_d
}

TEST_CASE("the 'paper' LP variant disagrees with value iteration") {
  const DiscountSpec spec{0.5, 0.5};
  const std::vector<double> weights(5, 1.0);
  const LpSolution sol =
      simplex_solve(build_primal_lp(car(), spec, weights, LpVariant::paper));
  REQUIRE(sol.status == LpStatus::optimal);
  const auto [vi, report] = solve_discounted_depreciating(car(), spec, 1e-10);
  double gap = 0.0;
  for (int s = 0; s < 5; ++s)
    gap = std::max(gap, std::abs(sol.point[s] - vi.values[s]));
  CHECK(gap > 1e-3);  // the printed coefficient is not the Bellman relaxation
}

TEST_CASE("LP suite invariants on random MDPs") {
  for (int seedval = 0; seedval < 60; ++seedval) {
    RngState gen{static_cast<std::uint64_t>(seedval), 0};
    const int ns = 2 + gen.next_index(4);  // |S| <= 5
    const int na = 1 + gen.next_index(3);
    const Mdp mdp = testutil::random_mdp(gen, ns, na);
    const DiscountSpec spec{0.2 + 0.6 * gen.next_unit(), 0.9 * gen.next_unit()};
    const std::vector<double> weights(ns, 1.0);

    const LpInstance primal_lp = build_primal_lp(mdp, spec, weights);
    const LpSolution primal = simplex_solve(primal_lp);
    const LpSolution dual = simplex_solve(build_dual_lp(mdp, spec, weights));
    REQUIRE(primal.status == LpStatus::optimal);
    REQUIRE(dual.status == LpStatus::optimal);

    // strong duality
    CHECK(std::abs(primal.objective - dual.objective) <=
          1e-6 * (1 + std::abs(primal.objective)));

    // agreement with value iteration
    const auto [vi, report] = solve_discounted_depreciating(mdp, spec, 1e-9);
    for (int s = 0; s < ns; ++s)
      CHECK(std::abs(primal.point[s] - vi.values[s]) <= 1e-6);

    // complementary slackness
    std::size_t row = 0;
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < mdp.num_actions(s); ++a, ++row) {
        double lhs = 0.0;
        for (int t = 0; t < ns; ++t)
          lhs += primal_lp.rows[row][t] * primal.point[t];
        const double slack = lhs - primal_lp.rhs[row];
        CHECK(dual.point[row] * slack <= 1e-6);
      }

    // policy agreement away from ties
    const Policy lp_policy = policy_from_dual(mdp, dual);
    const double scale = 1.0 / (1.0 - spec.lambda * spec.gamma);
    for (int s = 0; s < ns; ++s) {
      double best = -1e300, second = -1e300;
      for (int a = 0; a < mdp.num_actions(s); ++a) {
        double q = mdp.reward[s][a] * scale;
        for (int t = 0; t < ns; ++t)
          q += spec.lambda * mdp.transition[s][a][t] * vi.values[t];
        if (q > best) {
          second = best;
          best = q;
        } else if (q > second) {
          second = q;
        }
      }
      if (mdp.num_actions(s) > 1 && best - second > 1e-5)
        CHECK(lp_policy.action_of[s] == report.greedy_policy.action_of[s]);
    }
  }
}

TEST_CASE("policy_from_dual rejects degenerate duals and zero weights") {
  LpSolution fake;
  fake.status = LpStatus::optimal;
  fake.point = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS(policy_from_dual(car(), fake));  // all-zero weights at s_d

  fake.point = {0.5, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const Policy p = policy_from_dual(car(), fake);
  CHECK(p.action_of[0] == 0);  // y(s_d, a_2) = 0 is never selected
}

TEST_CASE("LP export is line-oriented and stable") {
  const LpInstance lp = build_primal_lp(car(), {0.5, 0.5}, std::vector<double>(5, 1.0));
  const std::string text = serialize_lp(lp);
  CHECK(text.find("lp minimize vars 5") == 0);
  CHECK(serialize_lp(lp) == text);
}
