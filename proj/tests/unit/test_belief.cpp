#include <cmath>
#include <random>

#include "doctest.h"
#include "rhodec/belief.hpp"
#include "rhodec/errors.hpp"
#include "rhodec/mav_domain.hpp"
#include "support/oracles.hpp"

using namespace rhodec;

namespace {

// Two states, identity dynamics, observation chosen by the caller.
RhoDecPomdp sticky_model(const std::vector<double>& obs_table,
                         std::size_t num_obs) {
  ModelDefinition def;
  def.states = {"s0", "s1"};
  def.actions = {{"a"}};
  for (std::size_t z = 0; z < num_obs; ++z) {
    def.observations.resize(1);
    def.observations[0].push_back("z" + std::to_string(z));
  }
  def.allocate();
  def.T(0, 0, 0) = def.T(0, 1, 1) = 1.0;
  def.observation = obs_table;
  def.initial_belief = {0.3, 0.7};
  return RhoDecPomdp(std::move(def));
}

}  // namespace

TEST_CASE("uninformative observations leave the belief unchanged") {
  const auto model = sticky_model({0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25,
                                   0.25},
                                  4);
  const Belief b({0.3, 0.7});
  for (std::size_t z = 0; z < 4; ++z) {
    const auto r = belief_update(model, b, JointAction(0), JointObservation(z));
    CHECK(r.normalizer == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.posterior[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.posterior[1] == doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("deterministic observation keeps the predicted mass of the emitter") {
  ModelDefinition def;
  def.states = {"s0", "s1"};
  def.actions = {{"a"}};
  def.observations = {{"z0", "z1"}};
  def.allocate();
  // s0 -> (0.6, 0.4), s1 -> (0.2, 0.8); state k always emits zk.
  def.T(0, 0, 0) = 0.6;
  def.T(0, 0, 1) = 0.4;
  def.T(0, 1, 0) = 0.2;
  def.T(0, 1, 1) = 0.8;
  def.O(0, 0, 0) = 1.0;
  def.O(0, 1, 1) = 1.0;
  def.initial_belief = {0.5, 0.5};
  RhoDecPomdp model(std::move(def));
  const Belief b({0.5, 0.5});
  // Predicted mass on s1: 0.5*0.4 + 0.5*0.8 = 0.6.
  const auto r = belief_update(model, b, JointAction(0), JointObservation(1));
  CHECK(r.normalizer == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.posterior[0] == 0.0);
  CHECK(r.posterior[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-likelihood observation raises ImpossibleObservation") {
  const auto model = sticky_model({1.0, 0.0, 1.0, 0.0}, 2);
  CHECK_THROWS_AS(belief_update(model, Belief({0.5, 0.5}), JointAction(0),
                                JointObservation(1)),
                  ImpossibleObservation);
}

TEST_CASE("belief_from_history folds belief_update") {
  const auto model = mav::build_mav_domain();
  const Belief b0 = model.initial_belief();
  CHECK(belief_from_history(model, b0, {}) == b0);

  const JointHistory one = {{JointAction(3), JointObservation(5)}};
  CHECK(belief_from_history(model, b0, one) ==
        belief_update(model, b0, JointAction(3), JointObservation(5)).posterior);

  const JointHistory two = {{JointAction(1), JointObservation(2)},
                            {JointAction(2), JointObservation(9)}};
  const auto step1 =
      belief_update(model, b0, JointAction(1), JointObservation(2)).posterior;
  const auto step2 = belief_update(model, step1, JointAction(2),
                                   JointObservation(9))
                         .posterior;
  const auto folded = belief_from_history(model, b0, two);
  for (std::size_t s = 0; s < b0.size(); ++s) {
    CHECK(std::abs(folded[s] - step2[s]) < 1e-12);
  }
}

TEST_CASE("belief_from_history reports the failing step") {
  const auto model = sticky_model({1.0, 0.0, 1.0, 0.0}, 2);
  const JointHistory h = {{JointAction(0), JointObservation(0)},
                          {JointAction(0), JointObservation(1)}};
  try {
    belief_from_history(model, Belief({0.5, 0.5}), h);
    FAIL("expected ImpossibleObservation");
  } catch (const ImpossibleObservation& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("local and joint histories convert both ways") {
  const auto model = mav::build_mav_domain();
  std::vector<LocalHistory> locals = {{{0, 1}, {2, 3}}, {{1, 1}, {0, 3}}};
  const auto joint = make_joint_history(model, locals);
  REQUIRE(joint.size() == 2);
  CHECK(joint[0].action.value == 1);
  CHECK(joint[0].observation.value == 2 * 4 + 0);
  const auto back = split_joint_history(model, joint);
  CHECK(back[0].actions == locals[0].actions);
  CHECK(back[1].observations == locals[1].observations);

  locals[1].actions.pop_back();
  CHECK_THROWS_AS(make_joint_history(model, locals), DimensionError);
}

TEST_CASE("entropy examples") {
  CHECK(shannon_entropy(Belief::uniform(8)) == doctest::Approx(3.0));
  CHECK(shannon_entropy(Belief::degenerate(5, 2)) == 0.0);
  CHECK(shannon_entropy(Belief({0.5, 0.5, 0.0, 0.0})) == doctest::Approx(1.0));
}

TEST_CASE("rho reward examples") {
  ModelDefinition def;
  for (int s = 0; s < 8; ++s) def.states.push_back("s" + std::to_string(s));
  def.actions = {{"a0", "a1"}};
  def.observations = {{"z"}};
  def.allocate();
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t s = 0; s < 8; ++s) {
      def.T(a, s, s) = 1.0;
      def.O(a, s, 0) = 1.0;
    }
  }
  def.initial_belief.assign(8, 0.125);
  def.alpha = 1.0;
  def.uncertainty = Uncertainty::kShannonEntropy;
  const RhoDecPomdp penalized(def);
  CHECK(rho_reward(penalized, Belief::uniform(8), JointAction(0)) ==
        doctest::Approx(-3.0));

  for (std::size_t s = 0; s < 8; ++s) def.R(s, 1) = static_cast<double>(s);
  def.alpha = 0.0;
  def.uncertainty = Uncertainty::kNone;
  const RhoDecPomdp plain(def);
  CHECK(rho_reward(plain, Belief::uniform(8), JointAction(1)) ==
        doctest::Approx(3.5));
  CHECK(uncertainty_penalty(plain, Belief::uniform(8)) == 0.0);

  const auto mav = mav::build_mav_domain();
  const auto hostile_l1 = mav::state_index(0, mav::Status::kHostile);
  CHECK(rho_reward(mav, Belief::degenerate(8, hostile_l1), JointAction(3)) ==
        doctest::Approx(-1.2).epsilon(1e-12));
  CHECK(mav.reward(hostile_l1, 3) == doctest::Approx(-1.2).epsilon(1e-12));
}

TEST_CASE("observation branches partition the observation space") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const auto m = oracle::random_model(rng, {});
    const Belief b(oracle::random_simplex(rng, m.num_states()));
    for (std::size_t a = 0; a < m.num_joint_actions(); ++a) {
      double total = 0.0;
      for (const auto& br :
           observation_branches(m, b, JointAction(a))) {
        CHECK(br.probability > 0.0);
        total += br.probability;
        std::vector<double> expect;
        const double eta = oracle::filter(
            m, std::vector<double>(b.probs().begin(), b.probs().end()), a,
            br.observation.value, expect);
        CHECK(std::abs(eta - br.probability) < 1e-12);
        for (std::size_t s = 0; s < b.size(); ++s) {
          CHECK(std::abs(expect[s] - br.posterior[s]) < 1e-12);
        }
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("property: posteriors are normalized and nonnegative") {
  std::mt19937_64 rng(12);
  int cases = 0;
  while (cases < 1000) {
    const auto m = oracle::random_model(rng, {});
    const Belief b(oracle::random_simplex(rng, m.num_states(), 0.2));
    const std::size_t a =
        std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    const std::size_t z =
        std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    try {
      const auto r = belief_update(m, b, JointAction(a), JointObservation(z));
      double sum = 0.0;
      for (double p : r.posterior.probs()) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
      ++cases;
    } catch (const ImpossibleObservation&) {
    }
  }
}

TEST_CASE("property: entropy bounds and concavity") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 7;
    const auto p = oracle::random_simplex(rng, n, 0.3);
    const auto q = oracle::random_simplex(rng, n, 0.3);
    const double h = shannon_entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(n)) + 1e-12);
    CHECK(std::abs(h - oracle::entropy_bits(p)) < 1e-12);
    const double lambda = u(rng);
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) {
      mix[i] = lambda * p[i] + (1.0 - lambda) * q[i];
    }
    CHECK(shannon_entropy(mix) + 1e-12 >=
          lambda * h + (1.0 - lambda) * shannon_entropy(q));
  }
}
