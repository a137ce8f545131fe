#include "rhodec/policy_io.hpp"

#include <json.hpp>

#include "rhodec/errors.hpp"

namespace rhodec {

using nlohmann::json;

namespace {

json node_json(const RhoDecPomdp& model, const LocalPolicyTree& tree,
               std::size_t agent, std::size_t t, std::size_t seq) {
  json node;
  node["action"] = model.action_labels(agent)[tree.action(t, seq)];
  if (t + 1 < tree.depth()) {
    json children = json::array();
    const auto& obs = model.observation_labels(agent);
    for (std::size_t z = 0; z < obs.size(); ++z) {
      json child = node_json(model, tree, agent, t + 1,
                             seq * tree.num_observations() + z);
      child["observation"] = obs[z];
      children.push_back(std::move(child));
    }
    node["children"] = std::move(children);
  }
  return node;
}

json policy_json(const RhoDecPomdp& model, const JointPolicy& policy) {
  json agents = json::array();
  for (std::size_t i = 0; i < policy.num_agents(); ++i) {
    agents.push_back(policy.depth() == 0
                         ? json::object()
                         : node_json(model, policy.agent(i), i, 0, 0));
  }
  return {{"horizon", policy.depth()}, {"agents", std::move(agents)}};
}

std::size_t lookup(const json& value, const std::vector<std::string>& labels,
                   const std::string& what) {
  if (value.is_number_unsigned()) {
    const auto k = value.get<std::size_t>();
    if (k >= labels.size()) {
      throw DimensionError(what + " index " + std::to_string(k) +
                           " out of range");
    }
    return k;
  }
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (labels[k] == s) return k;
    }
    throw DimensionError("unknown " + what + " '" + s + "'");
  }
  throw DimensionError(what + " must be a label or an index");
}

void read_node(const json& node, const RhoDecPomdp& model, std::size_t agent,
               std::size_t t, std::size_t seq, std::size_t horizon,
               std::vector<DecisionRule>& levels) {
  if (!node.is_object() || !node.contains("action")) {
    throw DimensionError("policy node at level " + std::to_string(t) +
                         " has no action");
  }
  levels[t][seq] = lookup(node["action"], model.action_labels(agent), "action");
  const bool has_children = node.contains("children");
  if (t + 1 == horizon) {
    if (has_children && !node["children"].empty()) {
      throw DimensionError("policy tree is deeper than its horizon");
    }
    return;
  }
  const auto& obs = model.observation_labels(agent);
  if (!has_children || !node["children"].is_array() ||
      node["children"].size() != obs.size()) {
    throw DimensionError("policy node at level " + std::to_string(t) +
                         " needs one child per observation");
  }
  std::vector<bool> seen(obs.size(), false);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const json& child = node["children"][k];
    const std::size_t z = child.contains("observation")
                              ? lookup(child["observation"], obs, "observation")
                              : k;
    if (seen[z]) throw DimensionError("repeated observation in policy node");
    seen[z] = true;
    read_node(child, model, agent, t + 1, seq * obs.size() + z, horizon,
              levels);
  }
}

}  // namespace

std::string write_policy(const RhoDecPomdp& model, const JointPolicy& policy) {
  return policy_json(model, policy).dump(2);
}

JointPolicy read_policy(const RhoDecPomdp& model, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offsets only; report them as column on line 1
    throw SyntaxError(e.what(), 1, e.byte);
  }
  if (!doc.is_object() || !doc.contains("agents") || !doc["agents"].is_array()) {
    throw DimensionError("policy document needs an 'agents' array");
  }
  const auto& agents = doc["agents"];
  if (agents.size() != model.num_agents()) {
    throw DimensionError("policy has " + std::to_string(agents.size()) +
                         " agents, model has " +
                         std::to_string(model.num_agents()));
  }
  const std::size_t horizon = doc.value("horizon", std::size_t{0});
  if (horizon == 0) throw DimensionError("policy horizon must be positive");
  std::vector<LocalPolicyTree> trees;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::size_t A = model.action_space().size_of(i);
    const std::size_t Z = model.observation_space().size_of(i);
    std::vector<DecisionRule> levels;
    for (std::size_t t = 0; t < horizon; ++t) {
      levels.emplace_back(integer_power(Z, t), 0);
    }
    read_node(agents[i], model, i, 0, 0, horizon, levels);
    LocalPolicyTree tree(A, Z);
    for (auto& rule : levels) tree.append(std::move(rule));
    trees.push_back(std::move(tree));
  }
  return JointPolicy(std::move(trees));
}

std::string write_solve_report(const RhoDecPomdp& model,
                               const SolveResult& result, std::size_t horizon) {
  json doc;
  doc["horizon"] = horizon;
  doc["value"] = result.value;
  doc["optimal"] = result.optimal;
  doc["upper_bound"] = result.upper_bound;
  doc["bound_gap"] = result.bound_gap();
  doc["nodes_expanded"] = result.nodes_expanded;
  doc["nodes_generated"] = result.nodes_generated;
  doc["wall_time_s"] = result.wall_time;
  doc["policy"] = policy_json(model, result.policy);
  return doc.dump(2);
}

}  // namespace rhodec
