#pragma once

#include <string>
#include <vector>

#include "pbo/experiment.hpp"

namespace pbo {

/// Parses an experiment config from its JSON text. Schema errors name the
/// offending key. Required keys: objective, dimension, kernel, budget,
/// seeds, and policy (run) or policies (sweep).
ExperimentConfig parse_experiment_config(const std::string& json_text);

/// Policies listed under "policies" for sweep runs; falls back to the
/// single "policy" entry.
std::vector<PolicyConfig> parse_policy_list(const std::string& json_text);

/// Config echo with run metadata (reference-optimum estimates, cost
/// accounting notes) for the .meta.json sidecar.
std::string experiment_metadata_json(const ExperimentConfig& config,
                                     const std::vector<std::vector<RegretRecord>>& per_seed);

}  // namespace pbo
