#include <cmath>
#include <random>

#include "doctest.h"
#include "rhodec/belief.hpp"
#include "rhodec/errors.hpp"
#include "rhodec/mav_domain.hpp"
#include "rhodec/policy.hpp"
#include "support/oracles.hpp"

using namespace rhodec;

namespace {

LocalPolicyTree random_tree(std::mt19937_64& rng, std::size_t A, std::size_t Z,
                            std::size_t h) {
  LocalPolicyTree tree(A, Z);
  std::uniform_int_distribution<std::size_t> pick(0, A - 1);
  for (std::size_t t = 0; t < h; ++t) {
    DecisionRule rule(integer_power(Z, t));
    for (auto& x : rule) x = pick(rng);
    tree.append(rule);
  }
  return tree;
}

JointPolicy random_policy(std::mt19937_64& rng, const RhoDecPomdp& m,
                          std::size_t h) {
  std::vector<LocalPolicyTree> trees;
  for (std::size_t i = 0; i < m.num_agents(); ++i) {
    trees.push_back(random_tree(rng, m.action_space().size_of(i),
                                m.observation_space().size_of(i), h));
  }
  return JointPolicy(std::move(trees));
}

// Reverses agent i's observation labels in both the model and its tree, which
// reverses the order in which that agent's children are visited.
std::pair<RhoDecPomdp, JointPolicy> mirror_observations(
    const RhoDecPomdp& m, const JointPolicy& pi, std::size_t agent) {
  ModelDefinition def = m.definition();
  const auto& space = m.observation_space();
  const std::size_t Zi = space.size_of(agent);
  auto flip = [&](std::size_t z) {
    auto tuple = space.unflatten(z);
    tuple[agent] = Zi - 1 - tuple[agent];
    return space.flatten(tuple);
  };
  for (std::size_t a = 0; a < m.num_joint_actions(); ++a) {
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      for (std::size_t z = 0; z < space.size(); ++z) {
        def.O(a, s, flip(z)) = m.observation(a, s, z);
      }
    }
  }
  std::vector<LocalPolicyTree> trees;
  for (std::size_t i = 0; i < pi.num_agents(); ++i) {
    const auto& src = pi.agent(i);
    if (i != agent) {
      trees.push_back(src);
      continue;
    }
    LocalPolicyTree tree(src.num_actions(), Zi);
    for (std::size_t t = 0; t < src.depth(); ++t) {
      DecisionRule rule(src.level(t).size());
      for (std::size_t seq = 0; seq < rule.size(); ++seq) {
        std::size_t mirrored = 0, rest = seq, scale = 1;
        for (std::size_t k = 0; k < t; ++k) {
          mirrored += (Zi - 1 - rest % Zi) * scale;
          rest /= Zi;
          scale *= Zi;
        }
        rule[mirrored] = src.level(t)[seq];
      }
      tree.append(rule);
    }
    trees.push_back(tree);
  }
  return {RhoDecPomdp(std::move(def)), JointPolicy(std::move(trees))};
}

}  // namespace

TEST_CASE("trees validate appended rules") {
  LocalPolicyTree tree(2, 3);
  CHECK_NOTHROW(tree.append({1}));
  CHECK_THROWS_AS(tree.append({0, 1}), DimensionError);
  CHECK_THROWS_AS(tree.append({0, 2, 1}), DimensionError);
  CHECK_NOTHROW(tree.append({0, 1, 1}));
  const std::size_t obs[] = {2};
  CHECK(tree.action_after(obs) == 1);
  CHECK(tree.truncated(1).depth() == 1);
}

TEST_CASE("joint policies need equal depths") {
  LocalPolicyTree a(2, 2), b(2, 2);
  a.append({0});
  CHECK_THROWS_AS(JointPolicy({a, b}), DimensionError);
}

TEST_CASE("history probability examples") {
  const auto model = mav::build_mav_domain();
  const auto pi = mav::make_baseline_policy(mav::Baseline::kFixedRoles1, 3);
  CHECK(history_probability(model, pi, {}) == 1.0);
  // fixed_roles_1 plays (camera, radar) = joint action 1 first.
  CHECK(history_probability(model, pi,
                            {{JointAction(0), JointObservation(0)}}) == 0.0);
  const Belief b0 = model.initial_belief();
  for (std::size_t z = 0; z < 16; ++z) {
    double eta = 0.0;
    try {
      eta = belief_update(model, b0, JointAction(1), JointObservation(z))
                .normalizer;
    } catch (const ImpossibleObservation&) {
    }
    CHECK(std::abs(history_probability(
                       model, pi, {{JointAction(1), JointObservation(z)}}) -
                   eta) < 1e-12);
  }
}

TEST_CASE("history probability factorizes along the history") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const auto m = oracle::random_model(rng, {});
    const auto pi = random_policy(rng, m, 3);
    JointHistory theta;
    Belief b = m.initial_belief();
    double product = 1.0;
    std::vector<std::size_t> seq(2, 0);
    for (std::size_t t = 0; t < 3; ++t) {
      const JointAction a = pi.joint_action(m, t, seq);
      const auto branches = observation_branches(m, b, a);
      const auto& br = branches[std::uniform_int_distribution<std::size_t>(
          0, branches.size() - 1)(rng)];
      theta.push_back({a, br.observation});
      product *= br.probability;
      b = br.posterior;
      for (std::size_t i = 0; i < 2; ++i) {
        seq[i] = seq[i] * 2 +
                 m.observation_space().component(br.observation.value, i);
      }
      CHECK(std::abs(history_probability(m, pi, theta) - product) < 1e-12);
    }
  }
}

TEST_CASE("horizon-1 value is the first reward") {
  const auto model = mav::build_mav_domain();
  const auto pi = mav::make_baseline_policy(mav::Baseline::kTurnTaking2, 1);
  CHECK(policy_value(model, pi, 1) ==
        doctest::Approx(rho_reward(model, model.initial_belief(),
                                   JointAction(2)))
            .epsilon(1e-14));
}

TEST_CASE("policy value matches the history enumerator") {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 300; ++k) {
    oracle::RandomModelSpec spec;
    spec.alpha = k % 2 == 0 ? 0.0 : 1.0;
    const auto m = oracle::random_model(rng, spec);
    const std::size_t h = 1 + k % 3;
    const auto pi = random_policy(rng, m, h);
    CHECK(std::abs(policy_value(m, pi, h) - oracle::evaluate(m, pi, h)) <
          1e-9);
  }
}

TEST_CASE("policy value ignores the order children are visited in") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const auto m = oracle::random_model(rng, {});
    const auto pi = random_policy(rng, m, 3);
    const double v = policy_value(m, pi, 3);
    for (std::size_t agent = 0; agent < 2; ++agent) {
      const auto [m2, pi2] = mirror_observations(m, pi, agent);
      CHECK(std::abs(policy_value(m2, pi2, 3) - v) < 1e-9);
    }
  }
}

TEST_CASE("policy counts") {
  const auto mav = count_local_policies(2, 4, 3);
  CHECK(mav.full_history == BigInt(1) << 73);
  CHECK(mav.observation_tree == BigInt(1) << 21);
  for (std::size_t A : {1, 2, 5}) {
    const auto one = count_local_policies(A, 3, 1);
    CHECK(one.full_history == A);
    CHECK(one.observation_tree == A);
  }
  // Arbitrary precision: 2^(1+4+...+4^9) has over 100k bits.
  CHECK(msb(count_local_policies(2, 4, 10).observation_tree) == 349525);
  CHECK_THROWS_AS(count_local_policies(0, 1, 1), InvalidArgument);
}

TEST_CASE("decision rule enumeration") {
  std::size_t n = 0;
  for (const auto& rule : enumerate_decision_rules(2, 4, 0)) {
    CHECK(rule.size() == 1);
    ++n;
  }
  CHECK(n == 2);

  std::vector<DecisionRule> rules;
  for (const auto& rule : enumerate_decision_rules(2, 4, 1)) {
    rules.push_back(rule);
  }
  REQUIRE(rules.size() == 16);
  CHECK(rules.front() == DecisionRule{0, 0, 0, 0});
  CHECK(rules[1] == DecisionRule{0, 0, 0, 1});
  CHECK(rules.back() == DecisionRule{1, 1, 1, 1});
  CHECK(std::is_sorted(rules.begin(), rules.end()));

  try {
    enumerate_decision_rules(2, 4, 2, 10'000);
    FAIL("expected CombinatorialLimit");
  } catch (const CombinatorialLimit& e) {
    CHECK(e.count() == "65536");
  }
}

TEST_CASE("partial policy evaluation") {
  const auto model = mav::build_mav_domain();
  const Belief b0 = model.initial_belief();

  const auto empty = evaluate_partial_policy(model, JointPolicy::empty(model));
  CHECK(empty.prefix_value == 0.0);
  REQUIRE(empty.leaves.size() == 1);
  CHECK(empty.leaves.probability[0] == 1.0);
  CHECK(*empty.leaves.belief[0] == b0);

  const auto pi = mav::make_baseline_policy(mav::Baseline::kTurnTaking1, 3);
  CHECK(std::abs(evaluate_partial_policy(model, pi).prefix_value -
                 policy_value(model, pi, 3)) < 1e-12);

  const auto one = evaluate_partial_policy(model, pi.truncated(1));
  double total = 0.0;
  for (std::size_t leaf = 0; leaf < one.leaves.size(); ++leaf) {
    const auto idx = one.leaves.indices(leaf);
    const std::size_t z = idx[0] * 4 + idx[1];
    const auto r =
        belief_update(model, b0, JointAction(1), JointObservation(z));
    CHECK(std::abs(one.leaves.probability[leaf] - r.normalizer) < 1e-12);
    total += one.leaves.probability[leaf];
  }
  CHECK(one.leaves.size() == 16);
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("property: reachable history probabilities sum to one") {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 1000; ++k) {
    oracle::RandomModelSpec spec;
    spec.states = 2 + k % 3;
    const auto m = oracle::random_model(rng, spec);
    const auto pi = random_policy(rng, m, 3);
    for (std::size_t t = 0; t <= 3; ++t) {
      const auto ev = evaluate_partial_policy(m, pi.truncated(t));
      double total = 0.0;
      for (double p : ev.leaves.probability) {
        CHECK(p > 0.0);
        total += p;
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("encoding concatenates agent levels") {
  LocalPolicyTree a(2, 2), b(2, 2);
  a.append({1});
  a.append({0, 1});
  b.append({0});
  b.append({1, 1});
  JointPolicy pi({a, b});
  CHECK(pi.encoding() == std::vector<std::size_t>{1, 0, 1, 0, 1, 1});
}
