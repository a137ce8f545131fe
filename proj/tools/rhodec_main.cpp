// rhodec: command-line front end for the solver, simulators and model files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>

#include "rhodec/errors.hpp"
#include "rhodec/maastar.hpp"
#include "rhodec/mav_domain.hpp"
#include "rhodec/model_io.hpp"
#include "rhodec/policy_io.hpp"
#include "rhodec/simulation.hpp"
#include "rhodec/tracking.hpp"

namespace {

using namespace rhodec;
using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitCap = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string csv;
  std::string json;
};

// Writes to the named file, or stdout for "-".
void emit(const std::string& target, const std::string& text) {
  if (target.empty()) return;
  if (target == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(target, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + target);
  out << text;
}

// Human-readable summaries move to stderr when stdout carries CSV or JSON.
std::ostream& summary_stream(const Globals& g, const std::string& extra = {}) {
  const bool piped = g.csv == "-" || g.json == "-" || extra == "-";
  return piped ? std::cerr : std::cout;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::shared_ptr<const RhoDecPomdp> load(const std::string& spec) {
  if (spec == "mav") {
    return std::make_shared<const RhoDecPomdp>(mav::build_mav_domain());
  }
  return std::make_shared<const RhoDecPomdp>(load_model(spec));
}

HeuristicKind heuristic_from(const std::string& name) {
  if (name == "pomdp") return HeuristicKind::kCentralizedPomdp;
  if (name == "mdp") return HeuristicKind::kMdp;
  throw InvalidArgument("unknown heuristic '" + name + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized information gathering with rho-Dec-POMDPs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads for batch runs")
      ->check(CLI::PositiveNumber);
  app.add_option("--csv", g.csv, "CSV output file ('-' for stdout)");
  app.add_option("--json", g.json, "JSON output file ('-' for stdout)");

  // solve
  std::string model_spec = "mav";
  std::size_t horizon = 3;
  std::string heuristic = "pomdp";
  std::uint64_t cap = SolveOptions{}.expansion_cap;
  std::string policy_out;
  auto* solve = app.add_subcommand("solve", "Optimal joint policy via MAA*");
  solve->add_option("--model", model_spec, "Model file or 'mav'");
  solve->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  solve->add_option("--heuristic", heuristic, "pomdp | mdp");
  solve->add_option("--cap", cap, "Node expansion cap");
  solve->add_option("--out", policy_out, "Policy JSON output file");

  // evaluate
  std::string policy_in;
  auto* evaluate = app.add_subcommand("evaluate", "Exact value of a policy");
  evaluate->add_option("--model", model_spec, "Model file or 'mav'");
  evaluate->add_option("--policy", policy_in, "Policy JSON")->required();
  evaluate->add_option("--horizon", horizon)->check(CLI::PositiveNumber);

  // simulate
  std::string controller = "optimal";
  std::size_t comm = 3;
  std::size_t steps = 51;
  std::size_t runs = 50;
  auto* simulate =
      app.add_subcommand("simulate", "Closed-loop runs with periodic communication");
  simulate->add_option("--model", model_spec, "Model file or 'mav'");
  simulate->add_option("--controller", controller,
                       "optimal | random | cameras_only | fixed_roles_1 | "
                       "fixed_roles_2 | turn_taking_1 | turn_taking_2");
  simulate->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  simulate->add_option("--comm", comm)->check(CLI::PositiveNumber);
  simulate->add_option("--steps", steps)->check(CLI::PositiveNumber);
  simulate->add_option("--runs", runs)->check(CLI::PositiveNumber);

  // sweep
  std::string grid = "0:0.05:1";
  auto* sweep = app.add_subcommand("sweep", "Policy values over the neutral prior");
  sweep->add_option("--grid", grid, "start:step:stop or a comma list");
  sweep->add_option("--horizon", horizon)->check(CLI::PositiveNumber);

  // mav-domain
  mav::MavDomainParams mav_params;
  std::string model_out;
  auto* mav_cmd = app.add_subcommand("mav-domain", "Write the MAV tracking model");
  mav_cmd->add_option("--p-neutral", mav_params.prior_neutral)
      ->check(CLI::Range(0.0, 1.0));
  mav_cmd->add_option("--p0", mav_params.p_stay_neutral);
  mav_cmd->add_option("--p1", mav_params.p_stay_hostile);
  mav_cmd->add_option("--out", model_out, "Output file ('-' for stdout)")
      ->required();

  // track-sim
  std::string track_controller = "rho_dec";
  std::size_t track_steps = 150;
  auto* track = app.add_subcommand("track-sim", "Sector selection for KF tracking");
  track->add_option("--controller", track_controller, "rho_dec | scanning | random");
  track->add_option("--steps", track_steps)->check(CLI::PositiveNumber);

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("model", validate_path, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  SolveOptions options;
  try {
    options.heuristic = heuristic_from(heuristic);
    options.expansion_cap = cap;

    if (*solve) {
      auto model = load(model_spec);
      SolveResult result;
      int code = 0;
      try {
        result = solve_maastar(*model, horizon, options);
      } catch (const ResourceExhausted& e) {
        result = e.incumbent();
        code = kExitCap;
        std::cerr << "expansion cap reached; writing incumbent\n";
      }
      summary_stream(g, policy_out)
                << "value " << fmt(result.value) << "\n"
                << "optimal " << (result.optimal ? "yes" : "no") << "\n"
                << "nodes_expanded " << result.nodes_expanded << "\n"
                << "nodes_generated " << result.nodes_generated << "\n"
                << "bound_gap " << fmt(result.bound_gap()) << "\n"
                << "wall_time_s " << fmt(result.wall_time) << "\n";
      emit(policy_out, write_policy(*model, result.policy) + "\n");
      emit(g.json, write_solve_report(*model, result, horizon) + "\n");
      return code;
    }

    if (*evaluate) {
      auto model = load(model_spec);
      const JointPolicy policy = read_policy(*model, read_file(policy_in));
      const std::size_t h = evaluate->count("--horizon") ? horizon : policy.depth();
      const double value = policy_value(*model, policy, h);
      summary_stream(g) << "value " << fmt(value) << "\n";
      emit(g.json, json{{"horizon", h}, {"value", value}}.dump(2) + "\n");
      return 0;
    }

    if (*simulate) {
      sim::EpisodeConfig config;
      config.model = load(model_spec);
      config.horizon = horizon;
      config.comm_period = comm;
      config.total_decisions = steps;
      config.seed = g.seed;
      config.controller = sim::controller_from_string(controller);
      if (auto* opt = std::get_if<sim::OptimalController>(&config.controller)) {
        opt->options = options;
      }
      config.validate();
      const auto traces = sim::run_batch(config, runs, g.threads);
      const auto& model = *config.model;

      std::ostringstream csv;
      csv << "run,step";
      for (std::size_t i = 0; i < model.num_agents(); ++i) csv << ",action_" << i + 1;
      for (std::size_t i = 0; i < model.num_agents(); ++i) csv << ",obs_" << i + 1;
      csv << ",reward,cumulative\n";
      std::vector<double> totals;
      for (std::size_t r = 0; r < traces.size(); ++r) {
        for (std::size_t k = 0; k < traces[r].steps.size(); ++k) {
          const auto& s = traces[r].steps[k];
          csv << r << ',' << k;
          for (std::size_t i = 0; i < model.num_agents(); ++i) {
            csv << ',' << model.action_labels(i)[model.action_space().component(s.action.value, i)];
          }
          for (std::size_t i = 0; i < model.num_agents(); ++i) {
            csv << ','
                << model.observation_labels(i)[model.observation_space().component(
                       s.observation.value, i)];
          }
          csv << ',' << fmt(s.reward) << ',' << fmt(s.cumulative) << '\n';
        }
        totals.push_back(traces[r].total_reward());
      }
      emit(g.csv, csv.str());

      json summary{{"controller", sim::controller_name(config.controller)},
                   {"runs", runs},
                   {"steps", steps},
                   {"horizon", horizon},
                   {"comm", comm},
                   {"totals", totals}};
      if (totals.size() >= 2) {
        const auto ci = sim::aggregate_stats(totals);
        summary["mean"] = ci.mean;
        summary["ci95"] = ci.half_width;
        std::cerr << sim::controller_name(config.controller) << ": "
                  << fmt(ci.mean) << " +- " << fmt(ci.half_width) << "\n";
      } else {
        summary["mean"] = totals.front();
        std::cerr << sim::controller_name(config.controller) << ": "
                  << fmt(totals.front()) << "\n";
      }
      emit(g.json, summary.dump(2) + "\n");
      return 0;
    }

    if (*sweep) {
      const auto points = sim::parse_grid(grid);
      const auto rows = sim::prior_sweep_evaluation(points, horizon, {}, options);
      std::ostringstream csv;
      csv << "p_neutral,policy,value\n";
      json doc = json::array();
      for (const auto& row : rows) {
        csv << fmt(row.prior_neutral) << ',' << row.policy << ',' << fmt(row.value)
            << '\n';
        doc.push_back({{"p_neutral", row.prior_neutral},
                       {"policy", row.policy},
                       {"value", row.value}});
      }
      emit(g.csv.empty() && g.json.empty() ? "-" : g.csv, csv.str());
      emit(g.json, doc.dump(2) + "\n");
      return 0;
    }

    if (*mav_cmd) {
      mav_params.validate();
      emit(model_out, write_model(mav::build_mav_domain(mav_params)));
      return 0;
    }

    if (*track) {
      tracking::TrackingScenario scenario;
      scenario.seed = g.seed;
      scenario.steps = track_steps;
      scenario.solver = options;
      const auto kind = tracking::controller_from_string(track_controller);
      const auto metrics = tracking::simulate_tracking(scenario, kind);
      std::ostringstream csv;
      csv << "step,entropy_nats,interfered,err_x,err_y,baseline_err_x,"
             "baseline_err_y,action_1,action_2\n";
      for (const auto& r : metrics.steps) {
        csv << r.step << ',' << fmt(r.entropy) << ',' << (r.interfered ? 1 : 0)
            << ',' << fmt(r.error.x()) << ',' << fmt(r.error.y()) << ','
            << fmt(r.baseline_error.x()) << ',' << fmt(r.baseline_error.y())
            << ",a" << r.actions[0] + 1 << ",a" << r.actions[1] + 1 << '\n';
      }
      emit(g.csv, csv.str());
      json summary{{"controller", std::string(tracking::to_string(kind))},
                   {"steps", metrics.steps.size()},
                   {"mean_entropy_nats", metrics.mean_entropy},
                   {"interference_steps", metrics.interference_steps},
                   {"squared_error_vs_baseline", metrics.squared_error_vs_baseline}};
      std::cerr << summary.dump() << "\n";
      emit(g.json, summary.dump(2) + "\n");
      return 0;
    }

    if (*validate) {
      const auto model = load_model(validate_path);
      const auto violations = validate_model(model);
      for (const auto& v : violations) {
        std::cout << v.location << ": " << v.message << "\n";
      }
      if (!violations.empty()) return kExitInput;
      std::cout << "ok: " << model.num_agents() << " agents, "
                << model.num_states() << " states, " << model.num_joint_actions()
                << " joint actions, " << model.num_joint_observations()
                << " joint observations\n";
      return 0;
    }
  } catch (const CombinatorialLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
