#include "pbo/config.hpp"

#include <json.hpp>

#include "pbo/csv.hpp"

namespace pbo {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

const json& require_key(const json& obj, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + key + "'");
  return obj.at(key);
}

double number_at(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError("key '" + key + "' must be a number");
  return obj.at(key).get<double>();
}

BumpProfile bump_at(const json& obj, const std::string& key, BumpProfile fallback) {
  if (!obj.contains(key)) return fallback;
  const json& b = obj.at(key);
  BumpProfile out = fallback;
  out.base = number_at(b, "base", out.base);
  out.height = number_at(b, "height", out.height);
  out.width = number_at(b, "width", out.width);
  return out;
}

PolicyConfig parse_policy(const json& node) {
  PolicyConfig policy;
  if (node.is_string()) {
    policy.kind = policy_kind_from_string(node.get<std::string>());
    return policy;
  }
  if (!node.is_object()) throw ConfigError("key 'policy' must be a string or object");
  policy.kind = policy_kind_from_string(require_key(node, "name").get<std::string>());
  policy.lambda = number_at(node, "lambda", policy.lambda);
  policy.lambda_initial = number_at(node, "lambda_initial", policy.lambda_initial);
  policy.beta = number_at(node, "beta", policy.beta);
  policy.ucb_delta = number_at(node, "ucb_delta", policy.ucb_delta);
  if (!(policy.lambda > 0.0)) throw ConfigError("key 'policy.lambda' must be positive");
  if (!(policy.beta > 0.0 && policy.beta < 1.0))
    throw ConfigError("key 'policy.beta' must lie in (0, 1)");
  if (!(policy.lambda_initial > 0.0))
    throw ConfigError("key 'policy.lambda_initial' must be positive");
  return policy;
}

ExperimentConfig parse_config_json(const json& root) {
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  ExperimentConfig config;

  config.objective = objective_tag_from_string(require_key(root, "objective").get<std::string>());
  config.dimension = require_key(root, "dimension").get<int>();

  const json& kernel = require_key(root, "kernel");
  if (!kernel.is_object()) throw ConfigError("key 'kernel' must be an object");
  if (kernel.contains("family"))
    config.kernel.family = kernel_family_from_string(kernel.at("family").get<std::string>());
  config.kernel.lengthscale = number_at(kernel, "lengthscale", config.kernel.lengthscale);
  config.kernel.amplitude = number_at(kernel, "amplitude", config.kernel.amplitude);
  config.kernel.jitter = number_at(kernel, "jitter", config.kernel.jitter);

  if (root.contains("domain")) {
    const json& dom = root.at("domain");
    auto bound = [&](const char* key) -> Eigen::VectorXd {
      const json& v = require_key(dom, key);
      Eigen::VectorXd out(config.dimension);
      if (v.is_number()) {
        out.setConstant(v.get<double>());
      } else if (v.is_array()) {
        if (static_cast<int>(v.size()) != config.dimension)
          throw ConfigError(std::string("key 'domain.") + key + "' has wrong length");
        for (int i = 0; i < config.dimension; ++i) out[i] = v.at(i).get<double>();
      } else {
        throw ConfigError(std::string("key 'domain.") + key + "' must be a number or array");
      }
      return out;
    };
    config.domain.lower = bound("lower");
    config.domain.upper = bound("upper");
  }

  if (root.contains("cost")) {
    const json& cost = root.at("cost");
    if (!cost.is_object()) throw ConfigError("key 'cost' must be an object");
    const std::string kind = require_key(cost, "kind").get<std::string>();
    if (kind == "uniform") config.cost.kind = CostKind::uniform;
    else if (kind == "linear") config.cost.kind = CostKind::linear;
    else if (kind == "bump") config.cost.kind = CostKind::bump;
    else if (kind == "unknown") config.cost.kind = CostKind::unknown;
    else throw ConfigError("key 'cost.kind' must be uniform|linear|bump|unknown");
    config.cost.uniform_value = number_at(cost, "value", config.cost.uniform_value);
    if (!(config.cost.uniform_value > 0.0)) throw ConfigError("key 'cost.value' must be positive");
    config.cost.bump = bump_at(cost, "bump", config.cost.bump);
    if (cost.contains("underlying")) {
      const std::string u = cost.at("underlying").get<std::string>();
      if (u == "linear") config.cost.underlying = CostKind::linear;
      else if (u == "bump") config.cost.underlying = CostKind::bump;
      else if (u == "uniform") config.cost.underlying = CostKind::uniform;
      else throw ConfigError("key 'cost.underlying' must be uniform|linear|bump");
    }
  }

  config.policy = parse_policy(require_key(root, "policy"));

  config.budget = require_key(root, "budget").get<double>();

  const json& seeds = require_key(root, "seeds");
  if (!seeds.is_array() || seeds.empty()) throw ConfigError("key 'seeds' must be a nonempty array");
  for (const auto& s : seeds) config.seeds.push_back(s.get<std::uint64_t>());

  if (root.contains("standardize")) config.standardize = root.at("standardize").get<bool>();
  config.noise_variance = number_at(root, "noise_variance", config.noise_variance);
  if (root.contains("n_features")) config.n_features = root.at("n_features").get<int>();
  if (root.contains("init_points")) config.init_points = root.at("init_points").get<int>();
  if (root.contains("max_steps")) config.max_steps = root.at("max_steps").get<int>();
  if (root.contains("ref_grid_points")) config.ref_grid_points = root.at("ref_grid_points").get<int>();
  config.amplitude_bump = bump_at(root, "amplitude_bump", config.amplitude_bump);

  if (root.contains("optimizer")) {
    const json& opt = root.at("optimizer");
    config.optimizer.sweep_points_per_dim =
        static_cast<int>(number_at(opt, "sweep_points_per_dim", config.optimizer.sweep_points_per_dim));
    config.optimizer.restarts_per_dim =
        static_cast<int>(number_at(opt, "restarts_per_dim", config.optimizer.restarts_per_dim));
    config.optimizer.max_iterations =
        static_cast<int>(number_at(opt, "max_iterations", config.optimizer.max_iterations));
    config.optimizer.gradient_tolerance =
        number_at(opt, "gradient_tolerance", config.optimizer.gradient_tolerance);
    config.optimizer.temperature = number_at(opt, "temperature", config.optimizer.temperature);
  }

  config.validate();
  return config;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  return parse_config_json(parse_json(json_text));
}

std::vector<PolicyConfig> parse_policy_list(const std::string& json_text) {
  const json root = parse_json(json_text);
  std::vector<PolicyConfig> out;
  if (root.contains("policies")) {
    const json& list = root.at("policies");
    if (!list.is_array() || list.empty())
      throw ConfigError("key 'policies' must be a nonempty array");
    for (const auto& node : list) out.push_back(parse_policy(node));
  } else {
    out.push_back(parse_policy(require_key(root, "policy")));
  }
  return out;
}

std::string experiment_metadata_json(const ExperimentConfig& config,
                                     const std::vector<std::vector<RegretRecord>>& per_seed) {
  json meta;
  meta["objective"] = to_string(config.objective);
  meta["policy"] = to_string(config.policy.kind);
  meta["dimension"] = config.dimension;
  meta["budget"] = config.budget;
  meta["standardize"] = config.standardize;
  meta["n_features"] = config.n_features;
  meta["init_points"] = config.effective_init_points();
  meta["notes"] = json::array({
      "initialization points are charged against the budget at their cost-function values",
      "reference optima for prior-draw objectives are dense-grid plus refinement estimates",
  });
  json seeds = json::array();
  for (std::size_t i = 0; i < per_seed.size(); ++i) {
    json s;
    s["seed"] = config.seeds[i];
    if (!per_seed[i].empty()) {
      const RegretRecord& last = per_seed[i].back();
      s["final_regret"] = last.regret;
      s["final_cumulative_cost"] = last.cumulative_cost;
      s["steps"] = last.step;
      // regret + incumbent recovers the per-seed reference optimum
      s["reference_optimum"] = last.regret + last.incumbent;
    }
    seeds.push_back(std::move(s));
  }
  meta["seeds"] = std::move(seeds);
  return meta.dump(2);
}

}  // namespace pbo
