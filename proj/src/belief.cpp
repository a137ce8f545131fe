#include "rhodec/belief.hpp"

#include <cmath>

#include "rhodec/errors.hpp"

namespace rhodec {

namespace {

inline constexpr double kNoiseFloor = 1e-12;

// Normalizes in place; entries in [-1e-12, 0) are treated as rounding noise.
Belief normalized_posterior(std::vector<double> mass, double total) {
  double sum = 0.0;
  for (double& p : mass) {
    p /= total;
    if (p < 0.0 && p >= -kNoiseFloor) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > 0.0) {
    for (double& p : mass) p /= sum;
  }
  return Belief::trusted(std::move(mass));
}

}  // namespace

std::vector<double> predict(const RhoDecPomdp& model, std::span<const double> b,
                            JointAction a) {
  const std::size_t S = model.num_states();
  std::vector<double> out(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const double w = b[s];
    if (w == 0.0) continue;
    const auto row = model.transition_row(a.value, s);
    for (std::size_t next = 0; next < S; ++next) out[next] += w * row[next];
  }
  return out;
}

FilterResult belief_update(const RhoDecPomdp& model, const Belief& b,
                           JointAction a, JointObservation z) {
  const std::size_t S = model.num_states();
  std::vector<double> mass = predict(model, b.probs(), a);
  double eta = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    mass[s] *= model.observation(a.value, s, z.value);
    eta += mass[s];
  }
  if (!(eta > 0.0)) throw ImpossibleObservation(0);
  return {normalized_posterior(std::move(mass), eta), eta};
}

std::vector<ObservationBranch> observation_branches(const RhoDecPomdp& model,
                                                    const Belief& b,
                                                    JointAction a) {
  const std::size_t S = model.num_states();
  const std::size_t Z = model.num_joint_observations();
  const std::vector<double> pred = predict(model, b.probs(), a);

  // joint[z * S + s'] = O(z|s',a) * pred(s')
  std::vector<double> joint(Z * S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    if (pred[s] == 0.0) continue;
    const auto row = model.observation_row(a.value, s);
    for (std::size_t z = 0; z < Z; ++z) joint[z * S + s] = row[z] * pred[s];
  }

  std::vector<ObservationBranch> out;
  for (std::size_t z = 0; z < Z; ++z) {
    const double* first = joint.data() + z * S;
    double eta = 0.0;
    for (std::size_t s = 0; s < S; ++s) eta += first[s];
    if (!(eta > 0.0)) continue;
    out.push_back({JointObservation(z), eta,
                   normalized_posterior(std::vector<double>(first, first + S),
                                        eta)});
  }
  return out;
}

JointHistory make_joint_history(const RhoDecPomdp& model,
                                std::span<const LocalHistory> locals) {
  if (locals.size() != model.num_agents()) {
    throw DimensionError("joint history needs one local history per agent");
  }
  const std::size_t t = locals.empty() ? 0 : locals[0].length();
  for (const auto& l : locals) {
    if (l.actions.size() != t || l.observations.size() != t) {
      throw DimensionError("local histories must share one length");
    }
  }
  JointHistory out(t);
  std::vector<std::size_t> a(locals.size()), z(locals.size());
  for (std::size_t k = 0; k < t; ++k) {
    for (std::size_t i = 0; i < locals.size(); ++i) {
      a[i] = locals[i].actions[k];
      z[i] = locals[i].observations[k];
    }
    out[k] = {JointAction(model.action_space().flatten(a)),
              JointObservation(model.observation_space().flatten(z))};
  }
  return out;
}

std::vector<LocalHistory> split_joint_history(const RhoDecPomdp& model,
                                              const JointHistory& history) {
  std::vector<LocalHistory> out(model.num_agents());
  for (const auto& step : history) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].actions.push_back(
          model.action_space().component(step.action.value, i));
      out[i].observations.push_back(
          model.observation_space().component(step.observation.value, i));
    }
  }
  return out;
}

Belief belief_from_history(const RhoDecPomdp& model, const Belief& b0,
                           const JointHistory& history) {
  Belief b = b0;
  for (std::size_t k = 0; k < history.size(); ++k) {
    try {
      b = belief_update(model, b, history[k].action, history[k].observation)
              .posterior;
    } catch (const ImpossibleObservation&) {
      throw ImpossibleObservation(k);
    }
  }
  return b;
}

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double expected_state_reward(const RhoDecPomdp& model, const Belief& b,
                             JointAction a) {
  const auto r = model.reward_column(a.value);
  double sum = 0.0;
  for (std::size_t s = 0; s < r.size(); ++s) sum += r[s] * b[s];
  return sum;
}

double uncertainty_penalty(const RhoDecPomdp& model, const Belief& b) {
  switch (model.uncertainty()) {
    case Uncertainty::kNone:
      return 0.0;
    case Uncertainty::kShannonEntropy:
      return model.alpha() * shannon_entropy(b);
  }
  return 0.0;
}

double rho_reward(const RhoDecPomdp& model, const Belief& b, JointAction a) {
  return expected_state_reward(model, b, a) - uncertainty_penalty(model, b);
}

}  // namespace rhodec
