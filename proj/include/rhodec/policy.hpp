#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rhodec/belief.hpp"
#include "rhodec/model.hpp"

namespace rhodec {

/// Actions for every local observation sequence of one length t, indexed by
/// the sequence read as a base-|Z_i| number with z_1 most significant.
using DecisionRule = std::vector<std::size_t>;

std::size_t integer_power(std::size_t base, std::size_t exponent);

/// Deterministic local policy over observation histories. Level t holds the
/// decision rule for step t and has |Z_i|^t entries.
class LocalPolicyTree {
 public:
  LocalPolicyTree() = default;
  LocalPolicyTree(std::size_t num_actions, std::size_t num_observations);

  std::size_t depth() const { return levels_.size(); }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_observations() const { return num_observations_; }
  const DecisionRule& level(std::size_t t) const { return levels_.at(t); }

  std::size_t action(std::size_t t, std::size_t sequence_index) const {
    return levels_[t][sequence_index];
  }
  /// Action prescribed after observing `observations` (length < depth()).
  std::size_t action_after(std::span<const std::size_t> observations) const;

  /// Throws DimensionError when the rule has the wrong size or bad actions.
  void append(DecisionRule rule);
  LocalPolicyTree truncated(std::size_t depth) const;

  friend bool operator==(const LocalPolicyTree&,
                         const LocalPolicyTree&) = default;

 private:
  std::size_t num_actions_ = 0;
  std::size_t num_observations_ = 0;
  std::vector<DecisionRule> levels_;
};

/// One local policy tree per agent, all of the same depth. A tree of depth
/// t < h is a partial joint policy (delta_0, ..., delta_{t-1}).
class JointPolicy {
 public:
  JointPolicy() = default;
  explicit JointPolicy(std::vector<LocalPolicyTree> agents);

  /// Depth-0 policy sized for the model's agents.
  static JointPolicy empty(const RhoDecPomdp& model);

  std::size_t depth() const;
  std::size_t num_agents() const { return agents_.size(); }
  const LocalPolicyTree& agent(std::size_t i) const { return agents_.at(i); }

  /// Appends one joint decision rule (one local rule per agent).
  JointPolicy extended(std::span<const DecisionRule> rules) const;
  JointPolicy truncated(std::size_t depth) const;

  /// Joint action at step t given each agent's local sequence index.
  JointAction joint_action(const RhoDecPomdp& model, std::size_t t,
                           std::span<const std::size_t> sequence_index) const;

  /// Concatenation of every agent's levels; ordering used for tie-breaking.
  std::vector<std::size_t> encoding() const;

  friend bool operator==(const JointPolicy&, const JointPolicy&) = default;

 private:
  std::vector<LocalPolicyTree> agents_;
};

using PartialJointPolicy = JointPolicy;

/// Reachable joint observation histories of equal length, stored column-wise
/// in lexicographic history order.
struct LeafSet {
  std::size_t num_agents = 0;
  std::size_t depth = 0;  // history length of every leaf
  std::vector<double> probability;
  std::vector<std::shared_ptr<const Belief>> belief;
  std::vector<std::size_t> local_index;  // size() * num_agents, row-major

  std::size_t size() const { return probability.size(); }
  std::span<const std::size_t> indices(std::size_t leaf) const {
    return {local_index.data() + leaf * num_agents, num_agents};
  }
  static LeafSet root(std::size_t num_agents, Belief b0);
};

/// Memoizes reward and filtered branches per (leaf, joint action) so that
/// siblings sharing a parent leaf set reuse them.
class LeafExpansionCache {
 public:
  struct Branch {
    std::size_t observation = 0;
    double probability = 0.0;
    std::shared_ptr<const Belief> posterior;
  };
  struct Entry {
    bool ready = false;
    double reward = 0.0;
    std::vector<Branch> branches;
  };

  LeafExpansionCache(const RhoDecPomdp& model, const LeafSet& leaves);

  const Entry& get(std::size_t leaf, JointAction a);

 private:
  const RhoDecPomdp& model_;
  const LeafSet& leaves_;
  std::vector<Entry> entries_;
};

struct PartialEvaluation {
  double prefix_value = 0.0;
  LeafSet leaves;
};

/// Probability-weighted reward of applying `rule_step` at every leaf, and the
/// successor leaves. `policy` must have depth > t.
PartialEvaluation advance(const RhoDecPomdp& model, const LeafSet& leaves,
                          const JointPolicy& policy, std::size_t t,
                          LeafExpansionCache& cache);

/// Exact value of the first phi.depth() steps plus the reachable leaves.
PartialEvaluation evaluate_partial_policy(const RhoDecPomdp& model,
                                          const PartialJointPolicy& phi,
                                          const Belief& b0);
PartialEvaluation evaluate_partial_policy(const RhoDecPomdp& model,
                                          const PartialJointPolicy& phi);

/// Expected sum of rho rewards over the first `horizon` steps.
double policy_value(const RhoDecPomdp& model, const JointPolicy& policy,
                    std::size_t horizon, const Belief& b0);
double policy_value(const RhoDecPomdp& model, const JointPolicy& policy,
                    std::size_t horizon);

/// P(theta | policy, b0): zero for histories the policy would not produce.
double history_probability(const RhoDecPomdp& model, const JointPolicy& policy,
                           const JointHistory& history, const Belief& b0);
double history_probability(const RhoDecPomdp& model, const JointPolicy& policy,
                           const JointHistory& history);

using BigInt = boost::multiprecision::cpp_int;

struct PolicyCounts {
  BigInt full_history;      // mappings from action-observation histories
  BigInt observation_tree;  // behaviourally distinct observation trees
};

PolicyCounts count_local_policies(std::size_t action_count,
                                  std::size_t observation_count,
                                  std::size_t horizon);

/// Lexicographic enumeration of every local decision rule at step t.
class DecisionRuleRange {
 public:
  static constexpr std::uint64_t kDefaultCap = 1u << 20;

  /// Throws CombinatorialLimit when |A|^(|Z|^t) exceeds `cap`.
  DecisionRuleRange(std::size_t action_count, std::size_t observation_count,
                    std::size_t depth, std::uint64_t cap = kDefaultCap);

  std::uint64_t count() const { return count_; }
  std::size_t rule_size() const { return rule_size_; }

  class iterator {
   public:
    using value_type = DecisionRule;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    const DecisionRule& operator*() const { return rule_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    bool operator==(const iterator& other) const {
      return position_ == other.position_;
    }

   private:
    friend class DecisionRuleRange;
    std::size_t actions_ = 0;
    std::uint64_t position_ = 0;
    DecisionRule rule_;
  };

  iterator begin() const;
  iterator end() const;

 private:
  std::size_t actions_;
  std::size_t rule_size_;
  std::uint64_t count_;
};

inline DecisionRuleRange enumerate_decision_rules(
    std::size_t action_count, std::size_t observation_count, std::size_t depth,
    std::uint64_t cap = DecisionRuleRange::kDefaultCap) {
  return DecisionRuleRange(action_count, observation_count, depth, cap);
}

}  // namespace rhodec
