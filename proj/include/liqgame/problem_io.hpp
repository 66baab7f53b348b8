// SPDX-License-Identifier: Apache-2.0
//
// Problem records as JSON:
//   {"market": {"lambda", "gamma", "sigma", "s0", "drift"},
//    "agents": [{"x0", "alpha"}, ...],
//    "horizon": {"type": "finite", "T": 2} | {"type": "infinite"}}
// where drift is {"type": "zero"} | {"type": "constant", "value": v}
// | {"type": "sampled", "grid": [...], "values": [...]}.
#pragma once

#include "liqgame/model.hpp"

#include "json.hpp"

#include <filesystem>

namespace liqgame {

/// Parses and validates. Malformed documents raise ConfigError; semantic
/// problems raise the validate_problem errors.
ValidatedProblem problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const ValidatedProblem& problem);

ValidatedProblem load_problem(const std::filesystem::path& path);

nlohmann::json drift_to_json(const DriftSpec& drift);

}  // namespace liqgame
