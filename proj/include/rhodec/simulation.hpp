#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rhodec/maastar.hpp"
#include "rhodec/mav_domain.hpp"
#include "rhodec/model.hpp"
#include "rhodec/policy.hpp"

namespace rhodec::sim {

/// Replans with MAA* from the pooled joint belief at every communication.
struct OptimalController {
  SolveOptions options;
};

/// Re-issues the same tree at every communication point.
struct FixedPolicyController {
  JointPolicy policy;
};

/// MAV baseline re-issued with the absolute time as phase.
struct BaselineController {
  mav::Baseline kind = mav::Baseline::kCamerasOnly;
};

/// Uniform random action at every node, drawn from the episode generator.
struct RandomController {};

using Controller = std::variant<OptimalController, FixedPolicyController,
                                BaselineController, RandomController>;

/// Parses optimal | cameras_only | fixed_roles_1 | ... | random.
Controller controller_from_string(std::string_view name);
std::string controller_name(const Controller& controller);

struct EpisodeConfig {
  std::shared_ptr<const RhoDecPomdp> model;
  std::size_t horizon = 3;
  std::size_t comm_period = 3;
  std::size_t total_decisions = 51;
  std::uint64_t seed = 0;
  Controller controller = OptimalController{};

  /// Throws InvalidArgument unless 1 <= comm_period <= horizon etc.
  void validate() const;
};

struct StepRecord {
  std::size_t state = 0;  // true state when the action was taken
  JointAction action;
  JointObservation observation;
  double reward = 0.0;  // rho at the pooled joint belief
  double cumulative = 0.0;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  std::vector<Belief> cycle_beliefs;  // joint belief at each communication
  std::size_t planning_calls = 0;

  double total_reward() const {
    return steps.empty() ? 0.0 : steps.back().cumulative;
  }
};

/// Closed-loop execution with periodic communication: plan for `horizon`
/// steps, let every agent follow its own tree on its own observations for
/// `comm_period` steps, then pool the histories and refresh the belief.
EpisodeTrace run_episode(const EpisodeConfig& config);

/// Runs `runs` episodes, run k seeded with config.seed + k. Output order is
/// independent of `threads`.
std::vector<EpisodeTrace> run_batch(const EpisodeConfig& config,
                                    std::size_t runs, std::size_t threads = 1);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 s / sqrt(n)
};

/// Throws InsufficientData for fewer than two values.
ConfidenceInterval aggregate_stats(std::span<const double> totals);

struct SweepRow {
  double prior_neutral = 0.0;
  std::string policy;
  double value = 0.0;
};

/// Exact values of the optimal policy and the five MAV baselines for each
/// prior probability that the target is neutral.
std::vector<SweepRow> prior_sweep_evaluation(
    std::span<const double> p_neutral_grid, std::size_t horizon,
    const mav::MavDomainParams& base = {}, const SolveOptions& options = {});

/// Parses "start:step:stop" (inclusive stop, tolerant to rounding) or a
/// comma-separated list.
std::vector<double> parse_grid(std::string_view spec);

}  // namespace rhodec::sim
