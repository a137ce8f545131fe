#include "rhodec/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "rhodec/errors.hpp"

namespace rhodec {

JointSpace::JointSpace(std::vector<std::size_t> sizes)
    : sizes_(std::move(sizes)), strides_(sizes_.size(), 1) {
  for (std::size_t n : sizes_) {
    if (n == 0) throw DimensionError("joint space component of size 0");
  }
  for (std::size_t i = sizes_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * sizes_[i];
  }
  total_ = sizes_.empty() ? 1 : strides_[0] * sizes_[0];
}

std::size_t JointSpace::flatten(std::span<const std::size_t> components) const {
  if (components.size() != sizes_.size()) {
    throw DimensionError("joint index has " +
                         std::to_string(components.size()) +
                         " components, expected " +
                         std::to_string(sizes_.size()));
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (components[i] >= sizes_[i]) {
      throw DimensionError("component " + std::to_string(i) +
                           " out of range");
    }
    flat += components[i] * strides_[i];
  }
  return flat;
}

std::vector<std::size_t> JointSpace::unflatten(std::size_t flat) const {
  if (flat >= total_) throw DimensionError("joint index out of range");
  std::vector<std::size_t> out(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) out[i] = component(flat, i);
  return out;
}

std::string_view to_string(Uncertainty u) {
  switch (u) {
    case Uncertainty::kNone:
      return "none";
    case Uncertainty::kShannonEntropy:
      return "shannon-entropy";
  }
  return "none";
}

Uncertainty uncertainty_from_string(std::string_view name) {
  if (name == "none") return Uncertainty::kNone;
  if (name == "shannon-entropy" || name == "entropy") {
    return Uncertainty::kShannonEntropy;
  }
  throw InvalidArgument("unknown uncertainty function '" + std::string(name) +
                        "'");
}

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidBelief("belief over zero states");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || p > 1.0 + kStochasticTolerance) {
      throw InvalidBelief("belief entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw InvalidBelief("belief sums to " + std::to_string(sum));
  }
}

Belief Belief::uniform(std::size_t n) {
  return Belief(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Belief Belief::degenerate(std::size_t n, std::size_t state) {
  std::vector<double> p(n, 0.0);
  p.at(state) = 1.0;
  return Belief(std::move(p));
}

Belief Belief::trusted(std::vector<double> probs) {
  Belief b;
  b.probs_ = std::move(probs);
  return b;
}

std::size_t ModelDefinition::num_joint_actions() const {
  std::size_t n = 1;
  for (const auto& a : actions) n *= a.size();
  return n;
}

std::size_t ModelDefinition::num_joint_observations() const {
  std::size_t n = 1;
  for (const auto& z : observations) n *= z.size();
  return n;
}

void ModelDefinition::allocate() {
  const std::size_t S = num_states();
  const std::size_t A = num_joint_actions();
  const std::size_t Z = num_joint_observations();
  transition.assign(A * S * S, 0.0);
  observation.assign(A * S * Z, 0.0);
  reward.assign(A * S, 0.0);
  if (initial_belief.size() != S) initial_belief.assign(S, 0.0);
}

namespace {

std::vector<std::size_t> sizes_of(
    const std::vector<std::vector<std::string>>& labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.size());
  return out;
}

}  // namespace

RhoDecPomdp::RhoDecPomdp(ModelDefinition definition)
    : def_(std::move(definition)) {
  if (def_.actions.empty()) throw DimensionError("model has no agents");
  if (def_.actions.size() != def_.observations.size()) {
    throw DimensionError("action and observation lists disagree on agents");
  }
  if (def_.states.empty()) throw DimensionError("model has no states");
  actions_ = JointSpace(sizes_of(def_.actions));
  observations_ = JointSpace(sizes_of(def_.observations));
  const std::size_t S = num_states();
  const std::size_t A = actions_.size();
  const std::size_t Z = observations_.size();
  if (def_.transition.size() != A * S * S) {
    throw DimensionError("transition table has wrong size");
  }
  if (def_.observation.size() != A * S * Z) {
    throw DimensionError("observation table has wrong size");
  }
  if (def_.reward.size() != A * S) {
    throw DimensionError("reward table has wrong size");
  }
  if (def_.initial_belief.size() != S) {
    throw DimensionError("initial belief has wrong size");
  }
}

Belief RhoDecPomdp::initial_belief() const { return Belief(def_.initial_belief); }

std::string RhoDecPomdp::joint_action_label(JointAction a) const {
  std::string out;
  for (std::size_t i = 0; i < num_agents(); ++i) {
    if (i) out += ' ';
    out += def_.actions[i][actions_.component(a.value, i)];
  }
  return out;
}

std::string RhoDecPomdp::joint_observation_label(JointObservation z) const {
  std::string out;
  for (std::size_t i = 0; i < num_agents(); ++i) {
    if (i) out += ' ';
    out += def_.observations[i][observations_.component(z.value, i)];
  }
  return out;
}

std::vector<Violation> validate_model(const RhoDecPomdp& model) {
  std::vector<Violation> out;
  const std::size_t S = model.num_states();
  const std::size_t A = model.num_joint_actions();
  const auto& states = model.state_labels();

  auto check_row = [&](std::span<const double> row, const std::string& where) {
    double sum = 0.0;
    bool range_ok = true;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) range_ok = false;
      sum += p;
    }
    if (!range_ok) {
      out.push_back({where, 0.0, "entry outside [0, 1]"});
    }
    const double residual = std::abs(1.0 - sum);
    if (!(residual <= kStochasticTolerance)) {
      std::ostringstream msg;
      msg << "row sums to " << sum;
      out.push_back({where, residual, msg.str()});
    }
  };

  for (std::size_t a = 0; a < A; ++a) {
    const std::string al = model.joint_action_label(JointAction(a));
    for (std::size_t s = 0; s < S; ++s) {
      check_row(model.transition_row(a, s),
                "T(s=" + states[s] + ", a=" + al + ")");
    }
    for (std::size_t s = 0; s < S; ++s) {
      check_row(model.observation_row(a, s),
                "O(s'=" + states[s] + ", a=" + al + ")");
    }
    for (std::size_t s = 0; s < S; ++s) {
      if (!std::isfinite(model.reward(s, a))) {
        out.push_back({"R(s=" + states[s] + ", a=" + al + ")", 0.0,
                       "reward is not finite"});
      }
    }
  }
  check_row(model.initial_belief_probs(), "start");
  if (!(model.alpha() >= 0.0) || !std::isfinite(model.alpha())) {
    out.push_back({"alpha", 0.0, "alpha must be a finite value >= 0"});
  }
  return out;
}

}  // namespace rhodec
