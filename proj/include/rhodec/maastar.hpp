#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rhodec/errors.hpp"
#include "rhodec/model.hpp"
#include "rhodec/policy.hpp"

namespace rhodec {

enum class HeuristicKind {
  kCentralizedPomdp,  // exact full-communication expectimax
  kMdp,               // full observability, state rewards only
};

struct SolveOptions {
  HeuristicKind heuristic = HeuristicKind::kCentralizedPomdp;
  std::uint64_t expansion_cap = 1'000'000;
  /// Largest number of joint decision rules (or enumerated last-stage rules)
  /// a single expansion may visit.
  std::uint64_t rule_cap = DecisionRuleRange::kDefaultCap;
};

struct SolveResult {
  JointPolicy policy;
  double value = 0.0;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t nodes_generated = 0;
  double wall_time = 0.0;    // seconds
  double upper_bound = 0.0;  // equals value when the search completed
  bool optimal = false;

  double bound_gap() const { return upper_bound - value; }
};

/// The expansion cap was reached; carries the incumbent.
class ResourceExhausted : public Error {
 public:
  explicit ResourceExhausted(SolveResult incumbent)
      : Error("MAA* expansion cap reached"), incumbent_(std::move(incumbent)) {}
  const SolveResult& incumbent() const { return incumbent_; }

 private:
  SolveResult incumbent_;
};

/// Optimal value of the centralized (full-communication) rho-POMDP over
/// `remaining` steps, memoized on beliefs quantized to a 1e-12 grid.
class CentralizedPomdpBound {
 public:
  explicit CentralizedPomdpBound(const RhoDecPomdp& model) : model_(model) {}

  double value(const Belief& b, std::size_t remaining);
  double operator()(const LeafSet& leaves, std::size_t remaining);

  std::size_t memo_size() const { return memo_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const;
  };

  const RhoDecPomdp& model_;
  std::unordered_map<std::vector<std::int64_t>, double, KeyHash> memo_;
};

/// Finite-horizon MDP value table over R(s, a) only.
class MdpBound {
 public:
  MdpBound(const RhoDecPomdp& model, std::size_t max_remaining);

  double state_value(std::size_t s, std::size_t remaining) const {
    return values_[remaining][s];
  }
  double operator()(const LeafSet& leaves, std::size_t remaining) const;

 private:
  std::vector<std::vector<double>> values_;
};

double centralized_pomdp_bound(const RhoDecPomdp& model, const LeafSet& leaves,
                               std::size_t remaining_steps);
double mdp_bound(const RhoDecPomdp& model, const LeafSet& leaves,
                 std::size_t remaining_steps);

/// Best final decision rule for a partial policy of depth h-1 given its
/// leaves: enumerates all but the last agent and best-responds for the last.
struct LastStageSolution {
  std::vector<DecisionRule> rules;
  double value = 0.0;  // probability-weighted rho reward of the final step
};
LastStageSolution solve_last_stage(const RhoDecPomdp& model,
                                   const LeafSet& leaves,
                                   std::uint64_t rule_cap);

/// Multi-agent A* over partial joint policies. Throws ResourceExhausted when
/// the expansion cap is hit and CombinatorialLimit when one expansion would
/// exceed the rule cap.
SolveResult solve_maastar(const RhoDecPomdp& model, std::size_t horizon,
                          const SolveOptions& options, const Belief& b0);
SolveResult solve_maastar(const RhoDecPomdp& model, std::size_t horizon,
                          const SolveOptions& options = {});

}  // namespace rhodec
