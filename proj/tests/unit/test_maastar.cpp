#include <cmath>
#include <random>

#include "doctest.h"
#include "rhodec/belief.hpp"
#include "rhodec/maastar.hpp"
#include "rhodec/mav_domain.hpp"
#include "support/oracles.hpp"

using namespace rhodec;

namespace {

std::vector<double> start_of(const RhoDecPomdp& m) {
  return {m.initial_belief_probs().begin(), m.initial_belief_probs().end()};
}

double root_pomdp_bound(const RhoDecPomdp& m, std::size_t h) {
  return centralized_pomdp_bound(m, LeafSet::root(m.num_agents(),
                                                  m.initial_belief()),
                                 h);
}

double root_mdp_bound(const RhoDecPomdp& m, std::size_t h) {
  return mdp_bound(m, LeafSet::root(m.num_agents(), m.initial_belief()), h);
}

}  // namespace

TEST_CASE("single agent search equals belief-tree expectimax") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 60; ++k) {
    oracle::RandomModelSpec spec;
    spec.agents = 1;
    spec.actions = 2 + k % 2;
    spec.observations = 2 + k % 2;
    spec.alpha = k % 3 == 0 ? 0.0 : 0.7;
    const auto m = oracle::random_model(rng, spec);
    const std::size_t h = 1 + k % 3;
    const auto r = solve_maastar(m, h);
    CHECK(r.optimal);
    CHECK(std::abs(r.value - oracle::expectimax(m, start_of(m), h)) < 1e-9);
  }
}

TEST_CASE("two agent search equals exhaustive enumeration") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 40; ++k) {
    oracle::RandomModelSpec spec;
    spec.states = 2 + k % 2;
    spec.alpha = k % 2 == 0 ? 0.0 : 1.0;
    const auto m = oracle::random_model(rng, spec);
    const std::size_t h = 1 + k % 3;
    for (auto heuristic : {HeuristicKind::kCentralizedPomdp,
                           HeuristicKind::kMdp}) {
      SolveOptions opts;
      opts.heuristic = heuristic;
      const auto r = solve_maastar(m, h, opts);
      CHECK(std::abs(r.value - oracle::brute_force_optimum(m, h)) < 1e-9);
      CHECK(std::abs(policy_value(m, r.policy, h) - r.value) < 1e-9);
      CHECK(r.bound_gap() == 0.0);
    }
  }
}

TEST_CASE("MAV optimum dominates the baselines") {
  const auto m = mav::build_mav_domain();
  const auto r = solve_maastar(m, 3);
  REQUIRE(r.optimal);
  for (auto kind : {mav::Baseline::kCamerasOnly, mav::Baseline::kFixedRoles1,
                    mav::Baseline::kFixedRoles2, mav::Baseline::kTurnTaking1,
                    mav::Baseline::kTurnTaking2}) {
    CHECK(r.value >= policy_value(m, mav::make_baseline_policy(kind, 3), 3) -
                         1e-12);
  }
}

TEST_CASE("bounds over zero remaining steps are zero") {
  const auto m = mav::build_mav_domain();
  CHECK(root_pomdp_bound(m, 0) == 0.0);
  CHECK(root_mdp_bound(m, 0) == 0.0);
}

TEST_CASE("static uninformative model: bound is h times the best reward") {
  ModelDefinition def;
  def.states = {"s0", "s1", "s2"};
  def.actions = {{"x", "y"}, {"p", "q"}};
  def.observations = {{"u", "v"}, {"w"}};
  def.allocate();
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> r(-1.0, 1.0);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t s = 0; s < 3; ++s) {
      def.T(a, s, s) = 1.0;
      def.O(a, s, 0) = def.O(a, s, 1) = 0.5;
      def.R(s, a) = r(rng);
    }
  }
  def.initial_belief = {0.2, 0.3, 0.5};
  def.alpha = 0.4;
  def.uncertainty = Uncertainty::kShannonEntropy;
  const RhoDecPomdp m(std::move(def));
  double best = -1e300;
  for (std::size_t a = 0; a < 4; ++a) {
    best = std::max(best, rho_reward(m, m.initial_belief(), JointAction(a)));
  }
  for (std::size_t h = 1; h <= 4; ++h) {
    CHECK(std::abs(root_pomdp_bound(m, h) - h * best) < 1e-12);
  }
}

TEST_CASE("zero state reward gives a zero MDP bound") {
  std::mt19937_64 rng(34);
  auto base = oracle::random_model(rng, {});
  ModelDefinition def = base.definition();
  std::fill(def.reward.begin(), def.reward.end(), 0.0);
  const RhoDecPomdp m(std::move(def));
  CHECK(root_mdp_bound(m, 3) == 0.0);
  CHECK(oracle::brute_force_optimum(m, 2) <= 0.0);
}

TEST_CASE("admissibility and bound ordering on random instances") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 60; ++k) {
    oracle::RandomModelSpec spec;
    spec.alpha = k % 2 == 0 ? 0.0 : 1.0;
    const auto m = oracle::random_model(rng, spec);
    const std::size_t h = 1 + k % 3;
    const double opt = oracle::brute_force_optimum(m, h);
    const double pomdp = root_pomdp_bound(m, h);
    CHECK(pomdp + 1e-12 >= opt);
    CHECK(std::abs(pomdp - oracle::expectimax(m, start_of(m), h)) < 1e-9);
    CHECK(root_mdp_bound(m, h) + 1e-12 >= pomdp);
  }
}

TEST_CASE("returned value never exceeds the root priority") {
  std::mt19937_64 rng(36);
  for (int k = 0; k < 30; ++k) {
    const auto m = oracle::random_model(rng, {});
    const auto r = solve_maastar(m, 3);
    CHECK(r.value <= root_pomdp_bound(m, 3) + 1e-12);
    CHECK(r.upper_bound == r.value);
  }
}

TEST_CASE("search is deterministic") {
  std::mt19937_64 rng(37);
  const auto m = oracle::random_model(rng, {});
  const auto a = solve_maastar(m, 3);
  const auto b = solve_maastar(m, 3);
  CHECK(a.policy == b.policy);
  CHECK(a.value == b.value);
  CHECK(a.nodes_expanded == b.nodes_expanded);
  CHECK(a.nodes_generated == b.nodes_generated);
}

TEST_CASE("expansion cap raises ResourceExhausted with an incumbent") {
  const auto m = mav::build_mav_domain();
  SolveOptions opts;
  opts.expansion_cap = 1;
  try {
    solve_maastar(m, 3, opts);
    FAIL("expected ResourceExhausted");
  } catch (const ResourceExhausted& e) {
    const auto& inc = e.incumbent();
    CHECK_FALSE(inc.optimal);
    CHECK(inc.upper_bound >= inc.value);
    if (inc.policy.depth() == 3) {
      CHECK(std::abs(policy_value(m, inc.policy, 3) - inc.value) < 1e-9);
    }
  }
}

TEST_CASE("rule cap raises CombinatorialLimit") {
  const auto m = mav::build_mav_domain();
  SolveOptions opts;
  opts.rule_cap = 100;
  CHECK_THROWS_AS(solve_maastar(m, 3, opts), CombinatorialLimit);
}

TEST_CASE("last stage solution matches exhaustive final rules") {
  std::mt19937_64 rng(38);
  for (int k = 0; k < 30; ++k) {
    const auto m = oracle::random_model(rng, {});
    const auto r = solve_maastar(m, 2);
    const auto ev = evaluate_partial_policy(m, r.policy.truncated(1));
    const auto last = solve_last_stage(m, ev.leaves, 1u << 20);
    CHECK(std::abs(ev.prefix_value + last.value - r.value) < 1e-9);
  }
}

TEST_CASE("CentralizedPomdpBound memoizes beliefs") {
  const auto m = mav::build_mav_domain();
  CentralizedPomdpBound bound(m);
  const double v1 = bound.value(m.initial_belief(), 2);
  const std::size_t size = bound.memo_size();
  CHECK(size > 0);
  CHECK(bound.value(m.initial_belief(), 2) == v1);
  CHECK(bound.memo_size() == size);
}
