#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rhodec/model.hpp"

namespace rhodec {

struct FilterResult {
  Belief posterior;
  double normalizer = 0.0;  // prior probability of the observation
};

/// Bayes filter step: posterior(s') ∝ O(z|s',a) sum_s T(s'|s,a) b(s).
/// Throws ImpossibleObservation(0) when the normalizer is zero.
FilterResult belief_update(const RhoDecPomdp& model, const Belief& b,
                           JointAction a, JointObservation z);

/// Predicted state distribution sum_s T(.|s,a) b(s).
std::vector<double> predict(const RhoDecPomdp& model, std::span<const double> b,
                            JointAction a);

struct ObservationBranch {
  JointObservation observation;
  double probability = 0.0;
  Belief posterior;
};

/// Every joint observation with nonzero probability after taking `a` in `b`,
/// in increasing joint-observation order.
std::vector<ObservationBranch> observation_branches(const RhoDecPomdp& model,
                                                    const Belief& b,
                                                    JointAction a);

/// One agent's own alternating action/observation record.
struct LocalHistory {
  std::vector<std::size_t> actions;
  std::vector<std::size_t> observations;

  std::size_t length() const { return actions.size(); }
};

struct HistoryStep {
  JointAction action;
  JointObservation observation;
};

/// Joint history as a sequence of (a_k, z_{k+1}) pairs.
using JointHistory = std::vector<HistoryStep>;

/// Throws DimensionError if the local histories disagree in length or range.
JointHistory make_joint_history(const RhoDecPomdp& model,
                                std::span<const LocalHistory> locals);
std::vector<LocalHistory> split_joint_history(const RhoDecPomdp& model,
                                              const JointHistory& history);

/// Left fold of belief_update. ImpossibleObservation carries the index of the
/// failing step.
Belief belief_from_history(const RhoDecPomdp& model, const Belief& b0,
                           const JointHistory& history);

/// Entropy in bits, with 0 log 0 = 0.
double shannon_entropy(std::span<const double> probs);
inline double shannon_entropy(const Belief& b) {
  return shannon_entropy(b.probs());
}

double expected_state_reward(const RhoDecPomdp& model, const Belief& b,
                             JointAction a);

/// alpha * g(b); zero when the model has no uncertainty function.
double uncertainty_penalty(const RhoDecPomdp& model, const Belief& b);

/// rho(b, a) = sum_s R(s, a) b(s) - alpha g(b).
double rho_reward(const RhoDecPomdp& model, const Belief& b, JointAction a);

}  // namespace rhodec
