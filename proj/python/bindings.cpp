#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "rhodec/belief.hpp"
#include "rhodec/errors.hpp"
#include "rhodec/maastar.hpp"
#include "rhodec/mav_domain.hpp"
#include "rhodec/model.hpp"
#include "rhodec/model_io.hpp"
#include "rhodec/policy.hpp"
#include "rhodec/policy_io.hpp"
#include "rhodec/simulation.hpp"
#include "rhodec/tracking.hpp"

namespace py = pybind11;
using namespace rhodec;

namespace {

Belief belief_or_start(const RhoDecPomdp& m,
                       const std::optional<std::vector<double>>& b) {
  return b ? Belief(*b) : m.initial_belief();
}

py::object big_int(const BigInt& v) {
  return py::module_::import("builtins").attr("int")(v.str());
}

}  // namespace

PYBIND11_MODULE(_rhodec, mod) {
  mod.doc() = "Decentralized POMDPs with belief-dependent rewards";

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  auto invalid =
      py::register_exception<InvalidArgument>(mod, "InvalidArgument", base);
  py::register_exception<SyntaxError>(mod, "ModelSyntaxError", invalid);
  py::register_exception<DimensionError>(mod, "DimensionError", invalid);
  py::register_exception<StochasticityError>(mod, "StochasticityError",
                                             invalid);
  py::register_exception<InvalidBelief>(mod, "InvalidBelief", invalid);
  py::register_exception<InsufficientData>(mod, "InsufficientData", invalid);
  py::register_exception<ImpossibleObservation>(mod, "ImpossibleObservation",
                                                base);
  py::register_exception<CombinatorialLimit>(mod, "CombinatorialLimit", base);
  py::register_exception<NumericalFailure>(mod, "NumericalFailure", base);
  py::register_exception<ResourceExhausted>(mod, "ResourceExhausted", base);

  py::enum_<Uncertainty>(mod, "Uncertainty")
      .value("NONE", Uncertainty::kNone)
      .value("ENTROPY", Uncertainty::kShannonEntropy);

  py::class_<RhoDecPomdp, std::shared_ptr<RhoDecPomdp>>(mod, "Model")
      .def_property_readonly("num_agents", &RhoDecPomdp::num_agents)
      .def_property_readonly("num_states", &RhoDecPomdp::num_states)
      .def_property_readonly("num_joint_actions",
                             &RhoDecPomdp::num_joint_actions)
      .def_property_readonly("num_joint_observations",
                             &RhoDecPomdp::num_joint_observations)
      .def_property_readonly("alpha", &RhoDecPomdp::alpha)
      .def_property_readonly("uncertainty", &RhoDecPomdp::uncertainty)
      .def_property_readonly("states", &RhoDecPomdp::state_labels)
      .def("actions", &RhoDecPomdp::action_labels, py::arg("agent"))
      .def("observations", &RhoDecPomdp::observation_labels, py::arg("agent"))
      .def("transition", &RhoDecPomdp::transition, py::arg("action"),
           py::arg("state"), py::arg("next_state"))
      .def("observation", &RhoDecPomdp::observation, py::arg("action"),
           py::arg("next_state"), py::arg("observation"))
      .def("reward", &RhoDecPomdp::reward, py::arg("state"), py::arg("action"))
      .def_property_readonly("initial_belief",
                             [](const RhoDecPomdp& m) {
                               return std::vector<double>(
                                   m.initial_belief_probs().begin(),
                                   m.initial_belief_probs().end());
                             })
      .def("__repr__", [](const RhoDecPomdp& m) {
        return "<Model agents=" + std::to_string(m.num_agents()) +
               " states=" + std::to_string(m.num_states()) + ">";
      });

  mod.def("parse_model", [](const std::string& text) {
    return std::make_shared<RhoDecPomdp>(parse_model(text));
  });
  mod.def("load_model", [](const std::filesystem::path& path) {
    return std::make_shared<RhoDecPomdp>(load_model(path));
  });
  mod.def("write_model", &write_model, py::arg("model"));
  mod.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  mod.def(
      "validate_model",
      [](const RhoDecPomdp& m) {
        py::list out;
        for (const auto& v : validate_model(m)) {
          out.append(py::dict(py::arg("location") = v.location,
                              py::arg("residual") = v.residual,
                              py::arg("message") = v.message));
        }
        return out;
      },
      py::arg("model"));

  mod.def(
      "belief_update",
      [](const RhoDecPomdp& m, const std::vector<double>& b, std::size_t a,
         std::size_t z) {
        const auto r =
            belief_update(m, Belief(b), JointAction(a), JointObservation(z));
        return py::make_tuple(
            std::vector<double>(r.posterior.probs().begin(),
                                r.posterior.probs().end()),
            r.normalizer);
      },
      py::arg("model"), py::arg("belief"), py::arg("action"),
      py::arg("observation"));
  mod.def(
      "shannon_entropy",
      [](const std::vector<double>& b) { return shannon_entropy(Belief(b)); },
      py::arg("belief"));
  mod.def(
      "rho_reward",
      [](const RhoDecPomdp& m, const std::vector<double>& b, std::size_t a) {
        return rho_reward(m, Belief(b), JointAction(a));
      },
      py::arg("model"), py::arg("belief"), py::arg("action"));

  py::class_<JointPolicy>(mod, "JointPolicy")
      .def_property_readonly("depth", &JointPolicy::depth)
      .def_property_readonly("num_agents", &JointPolicy::num_agents)
      .def(
          "levels",
          [](const JointPolicy& p, std::size_t agent) {
            std::vector<DecisionRule> out;
            for (std::size_t t = 0; t < p.depth(); ++t) {
              out.push_back(p.agent(agent).level(t));
            }
            return out;
          },
          py::arg("agent"))
      .def("__eq__", [](const JointPolicy& a, const JointPolicy& b) {
        return a == b;
      });

  mod.def(
      "policy_value",
      [](const RhoDecPomdp& m, const JointPolicy& p, std::size_t h,
         const std::optional<std::vector<double>>& b) {
        return policy_value(m, p, h, belief_or_start(m, b));
      },
      py::arg("model"), py::arg("policy"), py::arg("horizon"),
      py::arg("belief") = py::none());
  mod.def("write_policy", &write_policy, py::arg("model"), py::arg("policy"));
  mod.def(
      "read_policy",
      [](const RhoDecPomdp& m, const std::string& json) {
        return read_policy(m, json);
      },
      py::arg("model"), py::arg("json"));
  mod.def(
      "count_local_policies",
      [](std::size_t actions, std::size_t observations, std::size_t h) {
        const auto c = count_local_policies(actions, observations, h);
        return py::make_tuple(big_int(c.full_history),
                              big_int(c.observation_tree));
      },
      py::arg("actions"), py::arg("observations"), py::arg("horizon"));

  py::class_<SolveResult>(mod, "SolveResult")
      .def_readonly("policy", &SolveResult::policy)
      .def_readonly("value", &SolveResult::value)
      .def_readonly("nodes_expanded", &SolveResult::nodes_expanded)
      .def_readonly("nodes_generated", &SolveResult::nodes_generated)
      .def_readonly("wall_time", &SolveResult::wall_time)
      .def_readonly("upper_bound", &SolveResult::upper_bound)
      .def_readonly("optimal", &SolveResult::optimal);

  mod.def(
      "solve_maastar",
      [](const RhoDecPomdp& m, std::size_t h, const std::string& heuristic,
         std::uint64_t expansion_cap,
         const std::optional<std::vector<double>>& b) {
        SolveOptions opts;
        if (heuristic == "mdp") {
          opts.heuristic = HeuristicKind::kMdp;
        } else if (heuristic != "pomdp") {
          throw InvalidArgument("heuristic must be 'pomdp' or 'mdp'");
        }
        opts.expansion_cap = expansion_cap;
        const Belief b0 = belief_or_start(m, b);
        py::gil_scoped_release release;
        return solve_maastar(m, h, opts, b0);
      },
      py::arg("model"), py::arg("horizon"), py::arg("heuristic") = "pomdp",
      py::arg("expansion_cap") = 1'000'000, py::arg("belief") = py::none());

  mod.def(
      "centralized_pomdp_bound",
      [](const RhoDecPomdp& m, std::size_t remaining) {
        return centralized_pomdp_bound(
            m, LeafSet::root(m.num_agents(), m.initial_belief()), remaining);
      },
      py::arg("model"), py::arg("remaining"));
  mod.def(
      "mdp_bound",
      [](const RhoDecPomdp& m, std::size_t remaining) {
        return mdp_bound(m, LeafSet::root(m.num_agents(), m.initial_belief()),
                         remaining);
      },
      py::arg("model"), py::arg("remaining"));

  mod.def(
      "build_mav_domain",
      [](double p_neutral, double p_stay_neutral, double p_stay_hostile) {
        mav::MavDomainParams p;
        p.prior_neutral = p_neutral;
        p.p_stay_neutral = p_stay_neutral;
        p.p_stay_hostile = p_stay_hostile;
        return std::make_shared<RhoDecPomdp>(mav::build_mav_domain(p));
      },
      py::arg("p_neutral") = 0.5, py::arg("p_stay_neutral") = 0.85,
      py::arg("p_stay_hostile") = 0.6);
  mod.def(
      "baseline_policy",
      [](const std::string& kind, std::size_t h, std::uint64_t seed) {
        return mav::make_baseline_policy(mav::baseline_from_string(kind), h,
                                         seed);
      },
      py::arg("kind"), py::arg("horizon"), py::arg("seed") = 0);

  mod.def(
      "simulate",
      [](std::shared_ptr<RhoDecPomdp> m, const std::string& controller,
         std::size_t h, std::size_t period, std::size_t decisions,
         std::size_t runs, std::uint64_t seed, std::size_t threads) {
        sim::EpisodeConfig cfg;
        cfg.model = std::move(m);
        cfg.horizon = h;
        cfg.comm_period = period;
        cfg.total_decisions = decisions;
        cfg.seed = seed;
        cfg.controller = sim::controller_from_string(controller);
        std::vector<double> totals;
        {
          py::gil_scoped_release release;
          for (const auto& t : sim::run_batch(cfg, runs, threads)) {
            totals.push_back(t.total_reward());
          }
        }
        return totals;
      },
      py::arg("model"), py::arg("controller"), py::arg("horizon") = 3,
      py::arg("period") = 3, py::arg("decisions") = 51, py::arg("runs") = 50,
      py::arg("seed") = 0, py::arg("threads") = 1);
  mod.def(
      "aggregate_stats",
      [](const std::vector<double>& totals) {
        const auto ci = sim::aggregate_stats(totals);
        return py::make_tuple(ci.mean, ci.half_width);
      },
      py::arg("totals"));
  mod.def(
      "prior_sweep",
      [](const std::vector<double>& grid, std::size_t h) {
        py::list out;
        for (const auto& row : sim::prior_sweep_evaluation(grid, h)) {
          out.append(py::make_tuple(row.prior_neutral, row.policy, row.value));
        }
        return out;
      },
      py::arg("grid"), py::arg("horizon") = 3);

  auto trk = mod.def_submodule("tracking", "Sector selection for tracking");
  trk.def(
      "kf_step",
      [](const tracking::Vec4& mean, const tracking::Mat4& cov,
         const std::optional<tracking::Vec2>& z, double dt, double accel,
         double meas) {
        const auto out = tracking::kf_step({mean, cov}, z, dt, {accel, meas});
        return py::make_tuple(out.mean, out.covariance);
      },
      py::arg("mean"), py::arg("covariance"), py::arg("measurement"),
      py::arg("dt") = 1.0, py::arg("accel_sigma") = 0.3,
      py::arg("measurement_sigma") = 0.05);
  trk.def("differential_entropy", &tracking::differential_entropy,
          py::arg("position_covariance"));
  trk.def(
      "discretize_belief",
      [](const tracking::Vec4& mean, const tracking::Mat4& cov) {
        const auto g = tracking::discretize_belief({mean, cov});
        return py::make_tuple(g.mass, g.geometry.cell_size);
      },
      py::arg("mean"), py::arg("covariance"));
  trk.def(
      "simulate",
      [](const std::string& controller, std::size_t steps, std::uint64_t seed) {
        tracking::TrackingScenario sc;
        sc.steps = steps;
        sc.seed = seed;
        const auto c = tracking::controller_from_string(controller);
        tracking::TrackingMetrics m;
        {
          py::gil_scoped_release release;
          m = tracking::simulate_tracking(sc, c);
        }
        py::list entropy;
        for (const auto& s : m.steps) entropy.append(s.entropy);
        return py::dict(py::arg("mean_entropy") = m.mean_entropy,
                        py::arg("interference_steps") = m.interference_steps,
                        py::arg("squared_error") = m.squared_error_vs_baseline,
                        py::arg("entropy") = entropy);
      },
      py::arg("controller"), py::arg("steps") = 150, py::arg("seed") = 0);
}
