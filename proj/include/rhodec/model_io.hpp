#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rhodec/model.hpp"

namespace rhodec {

/// Parses the text model format: the usual discrete Dec-POMDP directives
/// (agents, discount, values, states, start, actions, observations, T, O, R)
/// plus `alpha:` and `uncertainty:`. Labels may be referenced by name or
/// index and `*` expands over a dimension. Rows within 1e-6 of stochastic
/// are renormalized.
///
/// Throws SyntaxError, DimensionError or StochasticityError.
RhoDecPomdp parse_model(std::string_view text);

/// Canonical text form; parse_model(write_model(m)) reproduces m.
std::string write_model(const RhoDecPomdp& model);

RhoDecPomdp load_model(const std::filesystem::path& path);
void save_model(const RhoDecPomdp& model, const std::filesystem::path& path);

}  // namespace rhodec
