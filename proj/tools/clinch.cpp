#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "clinch/clinch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained clinching auction: run, verify, generate, fuzz"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string allocation_path;
  std::string out_path;
  bool trace = false;

  auto* run = app.add_subcommand("run", "Run the auction on an instance file");
  run->add_option("instance", instance_path, "instance JSON file")->required();
  run->add_flag("--trace", trace, "include price changes and flag resets");
  run->add_option("-o,--output", out_path, "write the allocation here instead of stdout");

  auto* verify = app.add_subcommand("verify", "Check an allocation for Pareto-optimality");
  verify->add_option("instance", instance_path, "instance JSON file")->required();
  verify->add_option("allocation", allocation_path, "allocation JSON file")->required();

  clinch::GenParams gen_params;
  auto* gen = app.add_subcommand("gen", "Generate a seeded random instance");
  gen->add_option("--agents", gen_params.agents, "number of agents")->required();
  gen->add_option("--items", gen_params.items, "number of items")->required();
  gen->add_option("--seed", gen_params.seed, "random seed")->required();
  gen->add_option("--value-max", gen_params.value_max, "largest value")->capture_default_str();
  gen->add_option("--budget-max", gen_params.budget_max, "largest budget")->capture_default_str();
  gen->add_option("-o,--output", out_path, "write the instance here instead of stdout");

  clinch::FuzzConfig fuzz_cfg;
  std::string mode = "properties";
  std::string mutation = "none";
  auto* fuzz = app.add_subcommand("fuzz", "Cross-check the mechanism on seeded random instances");
  fuzz->add_option("--cases", fuzz_cfg.cases, "number of cases")->capture_default_str();
  fuzz->add_option("--max-agents", fuzz_cfg.max_agents, "largest agent count")->capture_default_str();
  fuzz->add_option("--max-items", fuzz_cfg.max_items, "largest item count")->capture_default_str();
  fuzz->add_option("--seed", fuzz_cfg.seed, "base seed")->capture_default_str();
  fuzz->add_option("--mode", mode, "properties | oracle | truthfulness")->capture_default_str();
  fuzz->add_option("--value-max", fuzz_cfg.value_max, "largest value")->capture_default_str();
  fuzz->add_option("--budget-max", fuzz_cfg.budget_max, "largest budget")->capture_default_str();
  fuzz->add_option("--artifact-dir", fuzz_cfg.artifact_dir, "where failing cases are written")->capture_default_str();
  fuzz->add_option("--inject-mutation", mutation,
                   "none | skip-value-limited-reset | skip-value-limited-sell | skip-forced-clinch")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : clinch::exit_code::parse;
  }

  const std::optional<std::string> out = out_path.empty() ? std::nullopt : std::optional(out_path);
  if (*run) return clinch::cmd_run(instance_path, trace, out, std::cout, std::cerr);
  if (*verify) return clinch::cmd_verify(instance_path, allocation_path, std::cout, std::cerr);
  if (*gen) return clinch::cmd_gen(gen_params, out, std::cout, std::cerr);

  const auto parsed_mode = clinch::parse_fuzz_mode(mode);
  const auto parsed_mutation = clinch::parse_mutation(mutation);
  if (!parsed_mode || !parsed_mutation) {
    std::cerr << "error: unknown " << (parsed_mode ? "mutation " + mutation : "mode " + mode) << '\n';
    return clinch::exit_code::parse;
  }
  fuzz_cfg.mode = *parsed_mode;
  fuzz_cfg.mutation = *parsed_mutation;
  return clinch::cmd_fuzz(fuzz_cfg, std::cout, std::cerr);
}
