#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mecsfc/harness.hpp"
#include "mecsfc/json_io.hpp"

namespace fs = std::filesystem;
using namespace mecsfc;

namespace {

// Exit codes: 0 success, 1 error, 2 infeasible solution.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

int cmd_solve(const std::string& config_path, std::uint64_t seed, const std::string& algo,
              const std::string& out_dir) {
  const auto config = config_path.empty() ? ScenarioConfig{}
                                          : config_from_json(load_json_file(config_path));
  const auto scenario = generate_scenario(config, seed);

  Assignment assignment;
  Json report;
  Json trace;
  const auto metrics = run_algorithm(scenario, algo, &assignment, &report, &trace);

  fs::create_directories(out_dir);
  Json solution;
  solution["version"] = version_string();
  solution["config"] = config_to_json(config);
  solution["seed"] = seed;
  solution["algo"] = algo;
  solution["assignment"] = assignment_to_json(assignment);
  solution["report"] = report;
  solution["trace"] = trace;
  write_json_file((fs::path(out_dir) / "solution.json").string(), solution);
  write_json_file((fs::path(out_dir) / "scenario.json").string(), scenario_to_json(scenario));

  std::printf("algo=%s seed=%llu objective=%.9g avg_energy_J=%.6g offloaded_bits=%.6g feasible=%s\n",
              algo.c_str(), static_cast<unsigned long long>(seed), metrics.objective,
              metrics.avg_energy_j, metrics.offloaded_bits, metrics.feasible ? "true" : "false");
  return metrics.feasible ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir) {
  const auto spec_json = load_json_file(spec_path);
  const auto spec = sweep_spec_from_json(spec_json);
  const auto rows = run_sweep(spec);
  fs::create_directories(out_dir);
  const auto csv_path = (fs::path(out_dir) / "results.csv").string();
  emit_results(rows, csv_path, sweep_spec_to_json(spec));
  std::printf("wrote %zu rows to %s\n", rows.size(), csv_path.c_str());
  return kExitOk;
}

int cmd_validate(const std::string& solution_path, const std::string& config_path) {
  const auto solution = load_json_file(solution_path);
  const auto config = !config_path.empty()
                          ? config_from_json(load_json_file(config_path))
                          : config_from_json(solution.at("config"));
  const auto scenario = generate_scenario(config, solution.at("seed").get<std::uint64_t>());
  const auto assignment = assignment_from_json(solution.at("assignment"));
  const auto report = validate(scenario, assignment);
  std::cout << feasibility_to_json(report).dump(2) << "\n";
  return report.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-site MEC offloading, chain placement, and clock allocation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string algo = "gtda";
  std::string out_dir = "out";
  auto* solve = app.add_subcommand("solve", "Solve one seeded scenario");
  solve->add_option("--config", config_path, "Scenario config JSON (defaults when omitted)");
  solve->add_option("--seed", seed, "Scenario seed");
  solve->add_option("--algo", algo, "gtda | gojra | hoda")
      ->check(CLI::IsMember({"gtda", "gojra", "hoda"}));
  solve->add_option("--out", out_dir, "Output directory");

  std::string spec_path;
  std::string sweep_out = "out";
  auto* sweep = app.add_subcommand("sweep", "Run a seeded parameter sweep");
  sweep->add_option("--spec", spec_path, "Sweep spec JSON")->required();
  sweep->add_option("--out", sweep_out, "Output directory");

  std::string solution_path;
  std::string validate_config;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a stored solution");
  validate_cmd->add_option("--solution", solution_path, "solution.json from solve")->required();
  validate_cmd->add_option("--config", validate_config, "Config override (defaults to the embedded one)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, seed, algo, out_dir);
    if (sweep->parsed()) return cmd_sweep(spec_path, sweep_out);
    if (validate_cmd->parsed()) return cmd_validate(solution_path, validate_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
