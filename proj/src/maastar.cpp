#include "rhodec/maastar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <queue>

#include "rhodec/belief.hpp"

namespace rhodec {

namespace {

inline constexpr double kPruneTolerance = 1e-12;
inline constexpr double kQuantum = 1e-12;

}  // namespace

std::size_t CentralizedPomdpBound::KeyHash::operator()(
    const std::vector<std::int64_t>& key) const {
  std::size_t h = 0xcbf29ce484222325ull;
  for (std::int64_t v : key) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) +
         (h >> 2);
  }
  return h;
}

double CentralizedPomdpBound::value(const Belief& b, std::size_t remaining) {
  if (remaining == 0) return 0.0;
  std::vector<std::int64_t> key;
  key.reserve(b.size() + 1);
  key.push_back(static_cast<std::int64_t>(remaining));
  for (double p : b.probs()) key.push_back(std::llround(p / kQuantum));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const double penalty = uncertainty_penalty(model_, b);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < model_.num_joint_actions(); ++a) {
    double q = expected_state_reward(model_, b, JointAction(a)) - penalty;
    if (remaining > 1) {
      for (const auto& branch :
           observation_branches(model_, b, JointAction(a))) {
        q += branch.probability * value(branch.posterior, remaining - 1);
      }
    }
    best = std::max(best, q);
  }
  memo_.emplace(std::move(key), best);
  return best;
}

double CentralizedPomdpBound::operator()(const LeafSet& leaves,
                                         std::size_t remaining) {
  double sum = 0.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    sum += leaves.probability[i] * value(*leaves.belief[i], remaining);
  }
  return sum;
}

MdpBound::MdpBound(const RhoDecPomdp& model, std::size_t max_remaining)
    : values_(max_remaining + 1,
              std::vector<double>(model.num_states(), 0.0)) {
  const std::size_t S = model.num_states();
  for (std::size_t r = 1; r <= max_remaining; ++r) {
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < model.num_joint_actions(); ++a) {
        double q = model.reward(s, a);
        const auto row = model.transition_row(a, s);
        for (std::size_t next = 0; next < S; ++next) {
          q += row[next] * values_[r - 1][next];
        }
        best = std::max(best, q);
      }
      values_[r][s] = best;
    }
  }
}

double MdpBound::operator()(const LeafSet& leaves,
                            std::size_t remaining) const {
  double sum = 0.0;
  const auto& v = values_.at(remaining);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Belief& b = *leaves.belief[i];
    double inner = 0.0;
    for (std::size_t s = 0; s < b.size(); ++s) inner += b[s] * v[s];
    sum += leaves.probability[i] * inner;
  }
  return sum;
}

double centralized_pomdp_bound(const RhoDecPomdp& model, const LeafSet& leaves,
                               std::size_t remaining_steps) {
  CentralizedPomdpBound bound(model);
  return bound(leaves, remaining_steps);
}

double mdp_bound(const RhoDecPomdp& model, const LeafSet& leaves,
                 std::size_t remaining_steps) {
  return MdpBound(model, remaining_steps)(leaves, remaining_steps);
}

LastStageSolution solve_last_stage(const RhoDecPomdp& model,
                                   const LeafSet& leaves,
                                   std::uint64_t rule_cap) {
  const std::size_t n = model.num_agents();
  const std::size_t last = n - 1;
  const auto& aspace = model.action_space();
  const auto& zspace = model.observation_space();
  const std::size_t A_last = aspace.size_of(last);
  const std::size_t L = leaves.size();

  std::vector<std::size_t> types(n);
  for (std::size_t i = 0; i < n; ++i) {
    types[i] = integer_power(zspace.size_of(i), leaves.depth);
  }

  // Odometer digits: one per (enumerated agent, type), agent 0 first.
  struct Digit {
    std::size_t agent;
    std::size_t type;
  };
  std::vector<Digit> digits;
  BigInt count = 1;
  for (std::size_t i = 0; i < last; ++i) {
    for (std::size_t k = 0; k < types[i]; ++k) digits.push_back({i, k});
    count *= pow(BigInt(aspace.size_of(i)), static_cast<unsigned>(types[i]));
  }
  if (count > rule_cap) {
    throw CombinatorialLimit("last-stage rule enumeration exceeds cap " +
                                 std::to_string(rule_cap),
                             count.str());
  }

  // Composite index of the enumerated agents' actions; the joint action is
  // composite * A_last + a_last.
  std::vector<std::size_t> composite_stride(n, 1);
  for (std::size_t i = last; i-- > 0;) {
    composite_stride[i] =
        (i + 1 < last ? composite_stride[i + 1] * aspace.size_of(i + 1) : 1);
  }

  const std::size_t A = model.num_joint_actions();
  std::vector<double> payoff(L * A);
  for (std::size_t leaf = 0; leaf < L; ++leaf) {
    const Belief& b = *leaves.belief[leaf];
    const double p = leaves.probability[leaf];
    const double penalty = uncertainty_penalty(model, b);
    for (std::size_t a = 0; a < A; ++a) {
      payoff[leaf * A + a] =
          p * (expected_state_reward(model, b, JointAction(a)) - penalty);
    }
  }

  std::vector<std::vector<std::size_t>> group(digits.size());
  {
    std::vector<std::size_t> offset(n, 0);
    for (std::size_t i = 1; i < last; ++i) offset[i] = offset[i - 1] + types[i - 1];
    for (std::size_t leaf = 0; leaf < L; ++leaf) {
      for (std::size_t i = 0; i < last; ++i) {
        group[offset[i] + leaves.indices(leaf)[i]].push_back(leaf);
      }
    }
  }

  std::vector<std::size_t> composite(L, 0);
  std::vector<std::size_t> digit_value(digits.size(), 0);
  const std::size_t T_last = types[last];
  std::vector<double> acc(T_last * A_last, 0.0);
  for (std::size_t leaf = 0; leaf < L; ++leaf) {
    const std::size_t k = leaves.indices(leaf)[last];
    for (std::size_t a = 0; a < A_last; ++a) acc[k * A_last + a] += payoff[leaf * A + a];
  }

  auto best_response_total = [&](const std::vector<double>& table) {
    double total = 0.0;
    for (std::size_t k = 0; k < T_last; ++k) {
      total += *std::max_element(table.begin() + k * A_last,
                                 table.begin() + (k + 1) * A_last);
    }
    return total;
  };

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_digits;
  std::vector<double> best_table;
  std::vector<double> exact(T_last * A_last);
  for (;;) {
    if (best_response_total(acc) > best - 1e-9) {
      // The running table accumulates rounding; re-sum in leaf order.
      std::fill(exact.begin(), exact.end(), 0.0);
      for (std::size_t leaf = 0; leaf < L; ++leaf) {
        const std::size_t k = leaves.indices(leaf)[last];
        const double* row = payoff.data() + leaf * A + composite[leaf] * A_last;
        for (std::size_t a = 0; a < A_last; ++a) exact[k * A_last + a] += row[a];
      }
      const double total = best_response_total(exact);
      if (total > best + kPruneTolerance || best_digits.empty()) {
        best = total;
        best_digits = digit_value;
        best_table = exact;
      }
    }

    std::size_t d = digits.size();
    bool wrapped = true;
    while (d-- > 0) {
      const auto [agent, type] = digits[d];
      const std::size_t old_value = digit_value[d];
      const std::size_t new_value =
          old_value + 1 < aspace.size_of(agent) ? old_value + 1 : 0;
      digit_value[d] = new_value;
      for (std::size_t leaf : group[d]) {
        const std::size_t old_c = composite[leaf];
        const std::size_t new_c =
            old_c + (new_value - old_value) * composite_stride[agent];
        const std::size_t k = leaves.indices(leaf)[last];
        const double* from = payoff.data() + leaf * A + old_c * A_last;
        const double* to = payoff.data() + leaf * A + new_c * A_last;
        for (std::size_t a = 0; a < A_last; ++a) {
          acc[k * A_last + a] += to[a] - from[a];
        }
        composite[leaf] = new_c;
      }
      if (new_value != 0) {
        wrapped = false;
        break;
      }
    }
    if (wrapped) break;
  }

  LastStageSolution out;
  out.value = best;
  out.rules.resize(n);
  std::size_t d = 0;
  for (std::size_t i = 0; i < last; ++i) {
    out.rules[i].resize(types[i]);
    for (std::size_t k = 0; k < types[i]; ++k) out.rules[i][k] = best_digits[d++];
  }
  out.rules[last].resize(T_last);
  for (std::size_t k = 0; k < T_last; ++k) {
    const auto first = best_table.begin() + k * A_last;
    out.rules[last][k] = static_cast<std::size_t>(
        std::max_element(first, first + A_last) - first);
  }
  return out;
}

namespace {

struct SearchNode {
  PartialJointPolicy phi;
  double exact_value = 0.0;
  double heuristic_value = 0.0;
  double priority = 0.0;
  LeafSet leaves;
  std::uint64_t sequence = 0;
};

// Encoding of the lexicographically smallest completion of phi to the horizon.
std::vector<std::size_t> smallest_completion(const RhoDecPomdp& model,
                                             const PartialJointPolicy& phi,
                                             std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < phi.num_agents(); ++i) {
    const std::size_t z = model.observation_space().size_of(i);
    for (std::size_t t = 0; t < horizon; ++t) {
      if (t < phi.depth()) {
        const auto& rule = phi.agent(i).level(t);
        out.insert(out.end(), rule.begin(), rule.end());
      } else {
        out.resize(out.size() + integer_power(z, t), 0);
      }
    }
  }
  return out;
}

struct LowerPriority {
  bool operator()(const std::shared_ptr<SearchNode>& a,
                  const std::shared_ptr<SearchNode>& b) const {
    if (a->priority != b->priority) return a->priority < b->priority;
    return a->sequence > b->sequence;
  }
};

class Heuristic {
 public:
  Heuristic(const RhoDecPomdp& model, HeuristicKind kind, std::size_t horizon)
      : kind_(kind), pomdp_(model) {
    if (kind == HeuristicKind::kMdp) mdp_.emplace(model, horizon);
  }
  double operator()(const LeafSet& leaves, std::size_t remaining) {
    if (remaining == 0) return 0.0;
    return kind_ == HeuristicKind::kMdp ? (*mdp_)(leaves, remaining)
                                        : pomdp_(leaves, remaining);
  }

 private:
  HeuristicKind kind_;
  CentralizedPomdpBound pomdp_;
  std::optional<MdpBound> mdp_;
};

}  // namespace

SolveResult solve_maastar(const RhoDecPomdp& model, std::size_t horizon,
                          const SolveOptions& options, const Belief& b0) {
  if (horizon == 0) throw InvalidArgument("horizon must be at least 1");
  if (b0.size() != model.num_states()) {
    throw DimensionError("initial belief does not match the state space");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = model.num_agents();
  Heuristic heuristic(model, options.heuristic, horizon);

  SolveResult result;
  result.value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> incumbent_code;
  auto offer = [&](JointPolicy policy, double value) {
    const bool better = value > result.value + kPruneTolerance;
    const bool tie = !better && std::abs(value - result.value) <= kPruneTolerance;
    if (!better && !tie) return;
    auto code = policy.encoding();
    if (tie && !(code < incumbent_code)) return;
    result.policy = std::move(policy);
    result.value = value;
    incumbent_code = std::move(code);
  };

  // A node that can at best tie the incumbent is only worth keeping if one of
  // its completions could win the lexicographic tie-break.
  auto hopeless = [&](const SearchNode& node) {
    if (incumbent_code.empty()) return false;
    if (node.priority <= result.value - kPruneTolerance) return true;
    if (node.priority > result.value + kPruneTolerance) return false;
    return !(smallest_completion(model, node.phi, horizon) < incumbent_code);
  };

  std::priority_queue<std::shared_ptr<SearchNode>,
                      std::vector<std::shared_ptr<SearchNode>>, LowerPriority>
      open;
  std::uint64_t sequence = 0;
  {
    auto root = std::make_shared<SearchNode>();
    root->phi = JointPolicy::empty(model);
    root->leaves = LeafSet::root(n, b0);
    root->heuristic_value = heuristic(root->leaves, horizon);
    root->priority = root->heuristic_value;
    root->sequence = sequence++;
    open.push(std::move(root));
    result.nodes_generated = 1;
  }

  auto finish = [&] {
    result.wall_time = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  };

  while (!open.empty()) {
    auto node = open.top();
    if (node->priority <= result.value - kPruneTolerance) break;
    open.pop();
    if (hopeless(*node)) continue;

    if (result.nodes_expanded >= options.expansion_cap) {
      if (result.policy.num_agents() == 0) {
        // No complete policy yet: finish the best node with action 0.
        JointPolicy completed = node->phi;
        while (completed.depth() < horizon) {
          std::vector<DecisionRule> rules;
          for (std::size_t i = 0; i < n; ++i) {
            rules.emplace_back(integer_power(model.observation_space().size_of(i),
                                             completed.depth()),
                               0);
          }
          completed = completed.extended(rules);
        }
        offer(completed, policy_value(model, completed, horizon, b0));
      }
      result.upper_bound = std::max(node->priority, result.value);
      result.optimal = false;
      finish();
      throw ResourceExhausted(std::move(result));
    }
    ++result.nodes_expanded;

    const std::size_t t = node->phi.depth();
    if (t + 1 == horizon) {
      auto last = solve_last_stage(model, node->leaves, options.rule_cap);
      ++result.nodes_generated;
      offer(node->phi.extended(last.rules), node->exact_value + last.value);
      continue;
    }

    std::vector<DecisionRuleRange> ranges;
    BigInt joint_count = 1;
    for (std::size_t i = 0; i < n; ++i) {
      ranges.emplace_back(model.action_space().size_of(i),
                          model.observation_space().size_of(i), t,
                          options.rule_cap);
      joint_count *= ranges.back().count();
    }
    if (joint_count > options.rule_cap) {
      throw CombinatorialLimit("joint decision rules exceed cap " +
                                   std::to_string(options.rule_cap),
                               joint_count.str());
    }
    std::vector<std::vector<DecisionRule>> local_rules(n);
    for (std::size_t i = 0; i < n; ++i) {
      local_rules[i].assign(ranges[i].begin(), ranges[i].end());
    }

    LeafExpansionCache cache(model, node->leaves);
    std::vector<std::size_t> choice(n, 0);
    std::vector<DecisionRule> rules(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) rules[i] = local_rules[i][choice[i]];
      auto child = std::make_shared<SearchNode>();
      child->phi = node->phi.extended(rules);
      auto eval = advance(model, node->leaves, child->phi, t, cache);
      child->exact_value = node->exact_value + eval.prefix_value;
      child->leaves = std::move(eval.leaves);
      child->heuristic_value = heuristic(child->leaves, horizon - t - 1);
      child->priority = child->exact_value + child->heuristic_value;
      child->sequence = sequence++;
      ++result.nodes_generated;
      if (!hopeless(*child)) {
        open.push(std::move(child));
      }

      std::size_t i = n;
      while (i-- > 0) {
        if (++choice[i] < local_rules[i].size()) break;
        choice[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }

  result.upper_bound = result.value;
  result.optimal = true;
  finish();
  return result;
}

SolveResult solve_maastar(const RhoDecPomdp& model, std::size_t horizon,
                          const SolveOptions& options) {
  return solve_maastar(model, horizon, options, model.initial_belief());
}

}  // namespace rhodec
