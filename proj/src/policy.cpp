#include "rhodec/policy.hpp"

#include <algorithm>

#include "rhodec/errors.hpp"

namespace rhodec {

std::size_t integer_power(std::size_t base, std::size_t exponent) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) out *= base;
  return out;
}

LocalPolicyTree::LocalPolicyTree(std::size_t num_actions,
                                 std::size_t num_observations)
    : num_actions_(num_actions), num_observations_(num_observations) {
  if (num_actions == 0 || num_observations == 0) {
    throw DimensionError("policy tree needs nonempty action/observation sets");
  }
}

std::size_t LocalPolicyTree::action_after(
    std::span<const std::size_t> observations) const {
  std::size_t index = 0;
  for (std::size_t z : observations) {
    if (z >= num_observations_) throw DimensionError("observation out of range");
    index = index * num_observations_ + z;
  }
  return levels_.at(observations.size())[index];
}

void LocalPolicyTree::append(DecisionRule rule) {
  if (rule.size() != integer_power(num_observations_, depth())) {
    throw DimensionError("decision rule for step " + std::to_string(depth()) +
                         " must have " +
                         std::to_string(
                             integer_power(num_observations_, depth())) +
                         " entries");
  }
  for (std::size_t a : rule) {
    if (a >= num_actions_) throw DimensionError("action index out of range");
  }
  levels_.push_back(std::move(rule));
}

LocalPolicyTree LocalPolicyTree::truncated(std::size_t depth) const {
  LocalPolicyTree out(num_actions_, num_observations_);
  out.levels_.assign(levels_.begin(),
                     levels_.begin() + std::min(depth, levels_.size()));
  return out;
}

JointPolicy::JointPolicy(std::vector<LocalPolicyTree> agents)
    : agents_(std::move(agents)) {
  for (const auto& tree : agents_) {
    if (tree.depth() != agents_.front().depth()) {
      throw DimensionError("local policy trees must share one depth");
    }
  }
}

JointPolicy JointPolicy::empty(const RhoDecPomdp& model) {
  std::vector<LocalPolicyTree> trees;
  for (std::size_t i = 0; i < model.num_agents(); ++i) {
    trees.emplace_back(model.action_space().size_of(i),
                       model.observation_space().size_of(i));
  }
  return JointPolicy(std::move(trees));
}

std::size_t JointPolicy::depth() const {
  return agents_.empty() ? 0 : agents_.front().depth();
}

JointPolicy JointPolicy::extended(std::span<const DecisionRule> rules) const {
  if (rules.size() != agents_.size()) {
    throw DimensionError("one decision rule per agent required");
  }
  JointPolicy out = *this;
  for (std::size_t i = 0; i < rules.size(); ++i) out.agents_[i].append(rules[i]);
  return out;
}

JointPolicy JointPolicy::truncated(std::size_t depth) const {
  std::vector<LocalPolicyTree> trees;
  for (const auto& tree : agents_) trees.push_back(tree.truncated(depth));
  return JointPolicy(std::move(trees));
}

JointAction JointPolicy::joint_action(
    const RhoDecPomdp& model, std::size_t t,
    std::span<const std::size_t> sequence_index) const {
  const auto& space = model.action_space();
  std::size_t flat = 0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    flat = flat * space.size_of(i) + agents_[i].action(t, sequence_index[i]);
  }
  return JointAction(flat);
}

std::vector<std::size_t> JointPolicy::encoding() const {
  std::vector<std::size_t> out;
  for (const auto& tree : agents_) {
    for (std::size_t t = 0; t < tree.depth(); ++t) {
      const auto& rule = tree.level(t);
      out.insert(out.end(), rule.begin(), rule.end());
    }
  }
  return out;
}

LeafSet LeafSet::root(std::size_t num_agents, Belief b0) {
  LeafSet out;
  out.num_agents = num_agents;
  out.probability.push_back(1.0);
  out.belief.push_back(std::make_shared<const Belief>(std::move(b0)));
  out.local_index.assign(num_agents, 0);
  return out;
}

LeafExpansionCache::LeafExpansionCache(const RhoDecPomdp& model,
                                       const LeafSet& leaves)
    : model_(model),
      leaves_(leaves),
      entries_(leaves.size() * model.num_joint_actions()) {}

const LeafExpansionCache::Entry& LeafExpansionCache::get(std::size_t leaf,
                                                         JointAction a) {
  Entry& e = entries_[leaf * model_.num_joint_actions() + a.value];
  if (e.ready) return e;
  const Belief& b = *leaves_.belief[leaf];
  e.reward = rho_reward(model_, b, a);
  for (auto& branch : observation_branches(model_, b, a)) {
    e.branches.push_back(
        {branch.observation.value, branch.probability,
         std::make_shared<const Belief>(std::move(branch.posterior))});
  }
  e.ready = true;
  return e;
}

PartialEvaluation advance(const RhoDecPomdp& model, const LeafSet& leaves,
                          const JointPolicy& policy, std::size_t t,
                          LeafExpansionCache& cache) {
  const std::size_t n = leaves.num_agents;
  const auto& zspace = model.observation_space();
  PartialEvaluation out;
  out.leaves.num_agents = n;
  out.leaves.depth = leaves.depth + 1;
  for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
    const auto idx = leaves.indices(leaf);
    const JointAction a = policy.joint_action(model, t, idx);
    const auto& entry = cache.get(leaf, a);
    const double p = leaves.probability[leaf];
    out.prefix_value += p * entry.reward;
    for (const auto& branch : entry.branches) {
      out.leaves.probability.push_back(p * branch.probability);
      out.leaves.belief.push_back(branch.posterior);
      for (std::size_t i = 0; i < n; ++i) {
        out.leaves.local_index.push_back(
            idx[i] * zspace.size_of(i) +
            zspace.component(branch.observation, i));
      }
    }
  }
  return out;
}

PartialEvaluation evaluate_partial_policy(const RhoDecPomdp& model,
                                          const PartialJointPolicy& phi,
                                          const Belief& b0) {
  if (phi.num_agents() != model.num_agents()) {
    throw DimensionError("policy and model disagree on the number of agents");
  }
  PartialEvaluation state{0.0, LeafSet::root(model.num_agents(), b0)};
  for (std::size_t t = 0; t < phi.depth(); ++t) {
    LeafExpansionCache cache(model, state.leaves);
    PartialEvaluation next = advance(model, state.leaves, phi, t, cache);
    next.prefix_value += state.prefix_value;
    state = std::move(next);
  }
  return state;
}

PartialEvaluation evaluate_partial_policy(const RhoDecPomdp& model,
                                          const PartialJointPolicy& phi) {
  return evaluate_partial_policy(model, phi, model.initial_belief());
}

double policy_value(const RhoDecPomdp& model, const JointPolicy& policy,
                    std::size_t horizon, const Belief& b0) {
  if (policy.depth() < horizon) {
    throw DimensionError("policy depth is shorter than the horizon");
  }
  return evaluate_partial_policy(model, policy.truncated(horizon), b0)
      .prefix_value;
}

double policy_value(const RhoDecPomdp& model, const JointPolicy& policy,
                    std::size_t horizon) {
  return policy_value(model, policy, horizon, model.initial_belief());
}

double history_probability(const RhoDecPomdp& model, const JointPolicy& policy,
                           const JointHistory& history, const Belief& b0) {
  if (history.size() > policy.depth()) {
    throw DimensionError("history is longer than the policy");
  }
  const auto& aspace = model.action_space();
  const auto& zspace = model.observation_space();
  const std::size_t n = model.num_agents();
  std::vector<std::size_t> seq(n, 0);
  Belief b = b0;
  double prob = 1.0;
  for (std::size_t t = 0; t < history.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (aspace.component(history[t].action.value, i) !=
          policy.agent(i).action(t, seq[i])) {
        return 0.0;
      }
    }
    try {
      auto step = belief_update(model, b, history[t].action,
                                history[t].observation);
      prob *= step.normalizer;
      b = std::move(step.posterior);
    } catch (const ImpossibleObservation&) {
      return 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      seq[i] = seq[i] * zspace.size_of(i) +
               zspace.component(history[t].observation.value, i);
    }
  }
  return prob;
}

double history_probability(const RhoDecPomdp& model, const JointPolicy& policy,
                           const JointHistory& history) {
  return history_probability(model, policy, history, model.initial_belief());
}

PolicyCounts count_local_policies(std::size_t action_count,
                                  std::size_t observation_count,
                                  std::size_t horizon) {
  if (action_count == 0 || observation_count == 0 || horizon == 0) {
    throw InvalidArgument("policy counts need positive arguments");
  }
  // Number of histories of length < h: sum_t (|A||Z|)^t and sum_t |Z|^t.
  const BigInt az = BigInt(action_count) * observation_count;
  BigInt histories = 0, sequences = 0, az_pow = 1, z_pow = 1;
  for (std::size_t t = 0; t < horizon; ++t) {
    histories += az_pow;
    sequences += z_pow;
    az_pow *= az;
    z_pow *= observation_count;
  }
  auto power = [](BigInt base, BigInt exponent) {
    BigInt out = 1;
    while (exponent > 0) {
      if ((exponent & 1) != 0) out *= base;
      base *= base;
      exponent >>= 1;
    }
    return out;
  };
  return {power(action_count, histories), power(action_count, sequences)};
}

DecisionRuleRange::DecisionRuleRange(std::size_t action_count,
                                     std::size_t observation_count,
                                     std::size_t depth, std::uint64_t cap)
    : actions_(action_count) {
  if (action_count == 0 || observation_count == 0) {
    throw InvalidArgument("decision rules need nonempty spaces");
  }
  const BigInt size = pow(BigInt(observation_count), static_cast<unsigned>(depth));
  if (size > BigInt(std::uint64_t{1} << 32)) {
    throw CombinatorialLimit("too many observation sequences", size.str());
  }
  rule_size_ = static_cast<std::size_t>(size);
  const BigInt count = pow(BigInt(action_count), static_cast<unsigned>(rule_size_));
  if (count > cap) {
    throw CombinatorialLimit("decision rule enumeration exceeds cap " +
                                 std::to_string(cap),
                             count.str());
  }
  count_ = static_cast<std::uint64_t>(count);
}

DecisionRuleRange::iterator DecisionRuleRange::begin() const {
  iterator it;
  it.actions_ = actions_;
  it.position_ = 0;
  it.rule_.assign(rule_size_, 0);
  return it;
}

DecisionRuleRange::iterator DecisionRuleRange::end() const {
  iterator it;
  it.position_ = count_;
  return it;
}

DecisionRuleRange::iterator& DecisionRuleRange::iterator::operator++() {
  ++position_;
  for (std::size_t k = rule_.size(); k-- > 0;) {
    if (++rule_[k] < actions_) break;
    rule_[k] = 0;
  }
  return *this;
}

}  // namespace rhodec
