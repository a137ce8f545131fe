#include "rhodec/simulation.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <random>
#include <thread>

#include "rhodec/belief.hpp"
#include "rhodec/errors.hpp"

namespace rhodec::sim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t sample(std::span<const double> pmf, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return i;
  }
  // Rounding left u above the final partial sum: take the last nonzero entry.
  for (std::size_t i = pmf.size(); i-- > 0;) {
    if (pmf[i] > 0.0) return i;
  }
  return pmf.size() - 1;
}

JointPolicy random_policy(const RhoDecPomdp& model, std::size_t depth,
                          std::mt19937_64& rng) {
  JointPolicy policy = JointPolicy::empty(model);
  for (std::size_t t = 0; t < depth; ++t) {
    std::vector<DecisionRule> rules;
    for (std::size_t i = 0; i < model.num_agents(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(
          0, model.action_space().size_of(i) - 1);
      DecisionRule rule(
          integer_power(model.observation_space().size_of(i), t));
      for (auto& a : rule) a = pick(rng);
      rules.push_back(std::move(rule));
    }
    policy = policy.extended(rules);
  }
  return policy;
}

}  // namespace

Controller controller_from_string(std::string_view name) {
  if (name == "optimal" || name == "rho_dec") return OptimalController{};
  if (name == "random") return RandomController{};
  return BaselineController{mav::baseline_from_string(name)};
}

std::string controller_name(const Controller& controller) {
  return std::visit(
      Overloaded{
          [](const OptimalController&) { return std::string("optimal"); },
          [](const FixedPolicyController&) { return std::string("fixed"); },
          [](const BaselineController& c) {
            return std::string(mav::to_string(c.kind));
          },
          [](const RandomController&) { return std::string("random"); },
      },
      controller);
}

void EpisodeConfig::validate() const {
  if (!model) throw InvalidArgument("episode has no model");
  if (horizon == 0) throw InvalidArgument("horizon must be at least 1");
  if (comm_period == 0 || comm_period > horizon) {
    throw InvalidArgument("communication period must satisfy 1 <= c <= h");
  }
  if (total_decisions == 0) {
    throw InvalidArgument("episode needs at least one decision");
  }
  if (const auto* fixed = std::get_if<FixedPolicyController>(&controller)) {
    if (fixed->policy.depth() < comm_period) {
      throw InvalidArgument("fixed policy is shorter than the period");
    }
  }
}

EpisodeTrace run_episode(const EpisodeConfig& config) {
  config.validate();
  const RhoDecPomdp& model = *config.model;
  const std::size_t n = model.num_agents();
  const auto& aspace = model.action_space();
  const auto& zspace = model.observation_space();
  std::mt19937_64 rng(config.seed);

  Belief belief = model.initial_belief();
  std::size_t state = sample(belief.probs(), rng);
  EpisodeTrace trace;
  double cumulative = 0.0;

  std::size_t step = 0;
  while (step < config.total_decisions) {
    const JointPolicy policy = std::visit(
        Overloaded{
            [&](const OptimalController& c) {
              return solve_maastar(model, config.horizon, c.options, belief)
                  .policy;
            },
            [&](const FixedPolicyController& c) { return c.policy; },
            [&](const BaselineController& c) {
              return mav::make_baseline_policy(c.kind, config.horizon, 0, step);
            },
            [&](const RandomController&) {
              return random_policy(model, config.horizon, rng);
            },
        },
        config.controller);
    ++trace.planning_calls;
    trace.cycle_beliefs.push_back(belief);

    // Decentralized execution: each agent indexes its own tree with its own
    // observation sequence only.
    const std::size_t length =
        std::min(config.comm_period, config.total_decisions - step);
    std::vector<std::size_t> sequence(n, 0);
    std::vector<std::size_t> local_action(n);
    JointHistory history;
    std::vector<std::size_t> states;
    for (std::size_t k = 0; k < length; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        local_action[i] = policy.agent(i).action(k, sequence[i]);
      }
      const JointAction a(aspace.flatten(local_action));
      const std::size_t next =
          sample(model.transition_row(a.value, state), rng);
      const JointObservation z(sample(model.observation_row(a.value, next), rng));
      for (std::size_t i = 0; i < n; ++i) {
        sequence[i] = sequence[i] * zspace.size_of(i) +
                      zspace.component(z.value, i);
      }
      states.push_back(state);
      history.push_back({a, z});
      state = next;
    }

    // Communication: pool the local histories and score the cycle against
    // the joint beliefs they induce.
    for (std::size_t k = 0; k < length; ++k) {
      const double r = rho_reward(model, belief, history[k].action);
      cumulative += r;
      trace.steps.push_back({states[k], history[k].action,
                             history[k].observation, r, cumulative});
      belief = belief_update(model, belief, history[k].action,
                             history[k].observation)
                   .posterior;
    }
    step += length;
  }
  return trace;
}

std::vector<EpisodeTrace> run_batch(const EpisodeConfig& config,
                                    std::size_t runs, std::size_t threads) {
  config.validate();
  std::vector<EpisodeTrace> out(runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < runs; k = next++) {
      EpisodeConfig local = config;
      local.seed = config.seed + k;
      out[k] = run_episode(local);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, runs));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

ConfidenceInterval aggregate_stats(std::span<const double> totals) {
  if (totals.size() < 2) {
    throw InsufficientData("confidence interval needs at least two runs");
  }
  const double n = static_cast<double>(totals.size());
  double mean = 0.0;
  for (double v : totals) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : totals) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

std::vector<SweepRow> prior_sweep_evaluation(
    std::span<const double> p_neutral_grid, std::size_t horizon,
    const mav::MavDomainParams& base, const SolveOptions& options) {
  using mav::Baseline;
  std::vector<SweepRow> rows;
  for (double prior : p_neutral_grid) {
    if (!(prior >= 0.0 && prior <= 1.0)) {
      throw InvalidArgument("prior outside [0, 1]");
    }
    mav::MavDomainParams params = base;
    params.prior_neutral = prior;
    const RhoDecPomdp model = mav::build_mav_domain(params);
    rows.push_back(
        {prior, "optimal", solve_maastar(model, horizon, options).value});
    for (Baseline kind :
         {Baseline::kCamerasOnly, Baseline::kFixedRoles1,
          Baseline::kFixedRoles2, Baseline::kTurnTaking1,
          Baseline::kTurnTaking2}) {
      rows.push_back(
          {prior, std::string(mav::to_string(kind)),
           policy_value(model, mav::make_baseline_policy(kind, horizon),
                        horizon)});
    }
  }
  return rows;
}

namespace {

double parse_double(std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string_view::npos) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw InvalidArgument("grid must be start:step:stop");
    }
    const double start = parse_double(spec.substr(0, c1));
    const double step = parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_double(spec.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) {
      throw InvalidArgument("grid needs step > 0 and stop >= start");
    }
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back(std::min(stop, start + static_cast<double>(k) * step));
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const auto end = comma == std::string_view::npos ? spec.size() : comma;
    out.push_back(parse_double(spec.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

}  // namespace rhodec::sim
