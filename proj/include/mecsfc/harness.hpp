#pragma once

#include <string>
#include <vector>

#include "mecsfc/json_io.hpp"
#include "mecsfc/scenario.hpp"

namespace mecsfc {

// One experiment axis over seeded scenarios. `values` entries are numbers
// for the numeric parameters, topology names for "topology", and
// "<theta_tx>/<theta_cp>" strings for "theta_weights".
struct SweepSpec {
  std::string param;  // input_data_size | bandwidth | deadline | mus_per_cell
                      // | compute_budget | topology | theta_weights
  std::vector<Json> values;
  std::vector<std::string> algorithms;  // gtda | gojra | hoda
  std::vector<std::uint64_t> seeds;
  ScenarioConfig base;
  int threads = 0;  // 0 = hardware concurrency
};

SweepSpec sweep_spec_from_json(const Json& j);
Json sweep_spec_to_json(const SweepSpec& spec);

struct SweepRow {
  std::string param;
  std::string value;
  std::string algo;
  std::string topology;
  std::string seed;  // seed number, or "mean" for the aggregate row
  double objective = 0;
  double avg_energy_j = 0;
  double offloaded_bits = 0;
  bool feasible = false;
  bool failed = false;       // solver error; objective fields are NaN
  std::string error;         // not serialized into the CSV
  double objective_std = 0;  // aggregate rows only; lives in the sidecar
};

// Applies one sweep value to a config copy.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& param,
                                 const Json& value);
std::string sweep_value_label(const Json& value);

// Runs every (value, algorithm, seed) cell in a worker pool and returns the
// rows in canonical order, followed by one mean row per (value, algorithm).
// Cells whose solver throws are marked failed and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Writes the pinned CSV schema
//   param,value,algo,topology,seed,objective,avg_energy_J,offloaded_bits,feasible
// plus a sidecar <path>.meta.json with the full spec, code version, and the
// aggregate standard deviations. Throws on unwritable paths.
void emit_results(const std::vector<SweepRow>& rows, const std::string& path,
                  const Json& spec_echo = Json::object());

std::vector<SweepRow> parse_results(const std::string& path);

// Single-scenario metrics used by both the sweep and the CLI.
struct RunMetrics {
  double objective = 0;
  double avg_energy_j = 0;
  double offloaded_bits = 0;
  bool feasible = false;
  std::vector<double> objective_trace;
};

RunMetrics run_algorithm(const Scenario& scenario, const std::string& algo,
                         Assignment* assignment_out = nullptr, Json* report_out = nullptr,
                         Json* trace_out = nullptr);

const char* version_string();

}  // namespace mecsfc
