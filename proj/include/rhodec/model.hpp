#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rhodec {

/// Tolerance for row-stochasticity and belief normalization.
inline constexpr double kStochasticTolerance = 1e-9;

template <class Tag>
struct StrongIndex {
  std::size_t value = 0;

  constexpr StrongIndex() = default;
  constexpr explicit StrongIndex(std::size_t v) : value(v) {}
  constexpr auto operator<=>(const StrongIndex&) const = default;
};

using JointAction = StrongIndex<struct JointActionTag>;
using JointObservation = StrongIndex<struct JointObservationTag>;

/// Cartesian product of per-agent index spaces, flattened row-major with the
/// first agent as the most significant digit.
class JointSpace {
 public:
  JointSpace() = default;
  explicit JointSpace(std::vector<std::size_t> sizes);

  std::size_t num_agents() const { return sizes_.size(); }
  std::size_t size() const { return total_; }
  std::size_t size_of(std::size_t agent) const { return sizes_[agent]; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  std::size_t flatten(std::span<const std::size_t> components) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::size_t component(std::size_t flat, std::size_t agent) const {
    return (flat / strides_[agent]) % sizes_[agent];
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

enum class Uncertainty { kNone, kShannonEntropy };

std::string_view to_string(Uncertainty u);
Uncertainty uncertainty_from_string(std::string_view name);

/// Dense probability vector over states. Construction validates.
class Belief {
 public:
  Belief() = default;
  explicit Belief(std::vector<double> probs);

  static Belief uniform(std::size_t n);
  static Belief degenerate(std::size_t n, std::size_t state);
  /// Skips validation; the caller guarantees a normalized, nonnegative vector.
  static Belief trusted(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t s) const { return probs_[s]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  std::vector<double> probs_;
};

/// Mutable table layout used to assemble a model. Index conventions:
///   transition  [(a * S + s) * S + s']
///   observation [(a * S + s') * Z + z]
///   reward      [a * S + s]
struct ModelDefinition {
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;
  std::vector<std::vector<std::string>> observations;
  std::vector<double> transition;
  std::vector<double> observation;
  std::vector<double> reward;
  double alpha = 0.0;
  Uncertainty uncertainty = Uncertainty::kNone;
  std::vector<double> initial_belief;

  std::size_t num_states() const { return states.size(); }
  std::size_t num_joint_actions() const;
  std::size_t num_joint_observations() const;

  /// Sizes all tables from the label lists, zero-filled.
  void allocate();

  double& T(std::size_t a, std::size_t s, std::size_t next) {
    return transition[(a * num_states() + s) * num_states() + next];
  }
  double& O(std::size_t a, std::size_t next, std::size_t z) {
    return observation[(a * num_states() + next) * num_joint_observations() +
                       z];
  }
  double& R(std::size_t s, std::size_t a) {
    return reward[a * num_states() + s];
  }
};

/// Discrete decentralized POMDP with belief-dependent reward
///   rho(b, a) = sum_s R(s, a) b(s) - alpha * g(b).
/// Immutable once constructed.
class RhoDecPomdp {
 public:
  /// Throws DimensionError when table sizes disagree with the label lists.
  explicit RhoDecPomdp(ModelDefinition definition);

  std::size_t num_agents() const { return actions_.num_agents(); }
  std::size_t num_states() const { return def_.states.size(); }
  std::size_t num_joint_actions() const { return actions_.size(); }
  std::size_t num_joint_observations() const { return observations_.size(); }
  const JointSpace& action_space() const { return actions_; }
  const JointSpace& observation_space() const { return observations_; }

  double transition(std::size_t a, std::size_t s, std::size_t next) const {
    return def_.transition[(a * num_states() + s) * num_states() + next];
  }
  std::span<const double> transition_row(std::size_t a, std::size_t s) const {
    return {def_.transition.data() + (a * num_states() + s) * num_states(),
            num_states()};
  }
  double observation(std::size_t a, std::size_t next, std::size_t z) const {
    return def_.observation[(a * num_states() + next) *
                                num_joint_observations() +
                            z];
  }
  std::span<const double> observation_row(std::size_t a,
                                          std::size_t next) const {
    return {def_.observation.data() +
                (a * num_states() + next) * num_joint_observations(),
            num_joint_observations()};
  }
  double reward(std::size_t s, std::size_t a) const {
    return def_.reward[a * num_states() + s];
  }
  std::span<const double> reward_column(std::size_t a) const {
    return {def_.reward.data() + a * num_states(), num_states()};
  }

  double alpha() const { return def_.alpha; }
  Uncertainty uncertainty() const { return def_.uncertainty; }
  std::span<const double> initial_belief_probs() const {
    return def_.initial_belief;
  }
  /// Throws InvalidBelief if the stored start distribution is invalid.
  Belief initial_belief() const;

  const ModelDefinition& definition() const { return def_; }
  const std::vector<std::string>& state_labels() const { return def_.states; }
  const std::vector<std::string>& action_labels(std::size_t agent) const {
    return def_.actions[agent];
  }
  const std::vector<std::string>& observation_labels(std::size_t agent) const {
    return def_.observations[agent];
  }

  std::string joint_action_label(JointAction a) const;
  std::string joint_observation_label(JointObservation z) const;

 private:
  ModelDefinition def_;
  JointSpace actions_;
  JointSpace observations_;
};

struct Violation {
  std::string location;  // e.g. "T(s=l1, a=camera radar)"
  double residual = 0.0;
  std::string message;
};

/// Reports every broken model invariant; an empty result means the model is
/// well formed.
std::vector<Violation> validate_model(const RhoDecPomdp& model);

}  // namespace rhodec
