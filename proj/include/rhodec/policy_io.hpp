#pragma once

#include <string>
#include <string_view>

#include "rhodec/maastar.hpp"
#include "rhodec/model.hpp"
#include "rhodec/policy.hpp"

namespace rhodec {

/// JSON tree form of a joint policy:
///   {"horizon": h, "agents": [{"action": "camera",
///                              "children": [{"observation": "l1", ...}]}]}
/// Each node carries the action label; children are listed in observation
/// order and are absent at the last level.
std::string write_policy(const RhoDecPomdp& model, const JointPolicy& policy);

/// Inverse of write_policy. Actions and observations may be labels or
/// indices. Throws SyntaxError or DimensionError.
JointPolicy read_policy(const RhoDecPomdp& model, std::string_view json);

/// Policy plus solver statistics in one JSON record.
std::string write_solve_report(const RhoDecPomdp& model,
                               const SolveResult& result, std::size_t horizon);

}  // namespace rhodec
