// pbo: cost-aware Bayesian optimization experiments and the Pandora's Box
// verification suites, driven by JSON configs.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pbo/config.hpp"
#include "pbo/csv.hpp"
#include "pbo/experiment.hpp"
#include "pbo/summarize.hpp"
#include "pbo/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitToleranceFailure = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw pbo::ConfigError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) seeds.push_back(std::stoull(token));
  }
  if (seeds.empty()) throw pbo::ConfigError("empty --seeds list");
  return seeds;
}

fs::path trace_path(const fs::path& out_dir, const pbo::ExperimentConfig& config) {
  return out_dir / (pbo::to_string(config.policy.kind) + "_" + pbo::to_string(config.objective) + ".csv");
}

int run_one_policy(pbo::ExperimentConfig config, const fs::path& out_dir, int jobs) {
  const auto per_seed = pbo::run_experiment(config, jobs);
  const fs::path csv_path = trace_path(out_dir, config);
  write_file_atomic(csv_path, pbo::records_to_csv(per_seed, config.dimension));
  write_file_atomic(csv_path.string() + ".meta.json",
                    pbo::experiment_metadata_json(config, per_seed));
  std::cout << "wrote " << csv_path.string() << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::string& seeds,
            const std::string& policy_override, int jobs, bool sweep) {
  pbo::ExperimentConfig config = pbo::parse_experiment_config(read_file(config_path));
  if (!seeds.empty()) config.seeds = parse_seed_list(seeds);

  std::vector<pbo::PolicyConfig> policies;
  if (!policy_override.empty()) {
    pbo::PolicyConfig p = config.policy;
    p.kind = pbo::policy_kind_from_string(policy_override);
    policies.push_back(p);
  } else if (sweep) {
    policies = pbo::parse_policy_list(read_file(config_path));
  } else {
    policies.push_back(config.policy);
  }

  fs::create_directories(out_dir);
  for (const pbo::PolicyConfig& policy : policies) {
    config.policy = policy;
    config.validate();
    run_one_policy(config, out_dir, jobs);
  }
  return kExitOk;
}

int cmd_pandora_verify(int n_instances, int n_budget_instances, std::uint64_t seed,
                       bool inject_tie_rule_bug) {
  const pbo::OptimalityReport optimality = pbo::run_optimality_suite(n_instances, seed);
  for (const auto& row : optimality.residuals)
    std::printf("instance %3d  |gittins - optimal|  stop-early %.3e  open-on-tie %.3e\n",
                row.instance, row.residual_stop_early, row.residual_open_on_tie);
  std::printf("optimality suite: %d instances, max residual %.3e -> %s\n",
              static_cast<int>(optimality.residuals.size()), optimality.max_residual,
              optimality.pass ? "pass" : "FAIL");

  const pbo::BudgetSuiteReport budget =
      pbo::run_budget_suite(n_budget_instances, seed + 1, inject_tie_rule_bug);
  for (const auto& c : budget.cases)
    std::printf("budget %3d  B %.4f  lambda* %.6f  spend residual %.3e  value residual %.3e%s%s\n",
                c.instance, c.budget, c.lambda_star, c.spend_residual, c.value_residual,
                c.bracket_ok ? "" : "  [bracket FAIL]",
                c.note.empty() ? "" : ("  " + c.note).c_str());
  std::printf("budget suite: %d instances -> %s\n", static_cast<int>(budget.cases.size()),
              budget.pass ? "pass" : "FAIL");

  if (inject_tie_rule_bug) {
    const bool detected = !budget.pass;
    std::printf("negative control: injected tie-rule bug %s\n",
                detected ? "detected" : "NOT detected");
    return detected ? 1 : kExitToleranceFailure;
  }
  return (optimality.pass && budget.pass) ? kExitOk : kExitToleranceFailure;
}

int cmd_summarize(const std::string& out_dir, const std::string& output_file) {
  std::map<std::string, std::vector<std::vector<pbo::RegretRecord>>> per_policy;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    if (stem == "summary") continue;
    const std::string policy = stem.substr(0, stem.find('_'));
    std::ifstream in(entry.path());
    per_policy[policy] = pbo::read_records_csv(in);
  }
  if (per_policy.empty()) {
    std::cerr << "summarize: no trace CSVs in " << out_dir << "\n";
    return kExitConfigError;
  }
  const auto rows = pbo::summarize_regret(per_policy);
  const fs::path out_path =
      output_file.empty() ? fs::path(out_dir) / "summary.csv" : fs::path(output_file);
  write_file_atomic(out_path, pbo::summary_to_csv(rows));
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware Bayesian optimization with Pandora's Box Gittins indices"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", seeds, policy_override, summary_output;
  int jobs = 1;
  int n_instances = 200, n_budget_instances = 50;
  std::uint64_t verify_seed = 20240517;
  bool inject_bug = false;

  CLI::App* run = app.add_subcommand("run", "Run one experiment config and write trace CSVs");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seeds", seeds, "Seed override, comma separated");
  run->add_option("--policy", policy_override, "Policy override");
  run->add_option("--jobs", jobs, "Parallel seeds");

  CLI::App* sweep = app.add_subcommand("sweep", "Run every policy in the config's policies list");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--seeds", seeds, "Seed override, comma separated");
  sweep->add_option("--jobs", jobs, "Parallel seeds");

  CLI::App* verify = app.add_subcommand("pandora-verify", "Run the Pandora's Box oracle suites");
  verify->add_option("--instances", n_instances, "Optimality suite size");
  verify->add_option("--budget-instances", n_budget_instances, "Budget suite size");
  verify->add_option("--seed", verify_seed, "Suite RNG seed");
  verify->add_flag("--inject-tie-rule-bug", inject_bug,
                   "Negative control: swap tie rules and expect a detected mismatch");

  CLI::App* summarize = app.add_subcommand("summarize", "Median/quartile regret summary over CSVs");
  summarize->add_option("--out", out_dir, "Directory with trace CSVs");
  summarize->add_option("--output", summary_output, "Summary CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seeds, policy_override, jobs, false);
    if (sweep->parsed()) return cmd_run(config_path, out_dir, seeds, policy_override, jobs, true);
    if (verify->parsed())
      return cmd_pandora_verify(n_instances, n_budget_instances, verify_seed, inject_bug);
    if (summarize->parsed()) return cmd_summarize(out_dir, summary_output);
  } catch (const pbo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const pbo::AlignmentError& e) {
    std::cerr << "alignment error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitToleranceFailure;
  }
  return kExitOk;
}
