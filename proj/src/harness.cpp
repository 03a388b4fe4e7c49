#include "mecsfc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mecsfc/baselines.hpp"
#include "mecsfc/jcora.hpp"

namespace mecsfc {

const char* version_string() { return "0.1.0"; }

SweepSpec sweep_spec_from_json(const Json& j) {
  SweepSpec spec;
  spec.param = j.at("param").get<std::string>();
  spec.values = j.at("values").get<std::vector<Json>>();
  spec.algorithms = j.contains("algorithms")
                        ? j.at("algorithms").get<std::vector<std::string>>()
                        : std::vector<std::string>{"gtda"};
  if (j.contains("seeds")) {
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } else if (j.contains("seed_count")) {
    for (std::uint64_t s = 1; s <= j.at("seed_count").get<std::uint64_t>(); ++s) {
      spec.seeds.push_back(s);
    }
  }
  spec.base = j.contains("config") ? config_from_json(j.at("config")) : ScenarioConfig{};
  if (j.contains("threads")) spec.threads = j.at("threads").get<int>();
  if (spec.values.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("sweep spec needs a non-empty value list and seed list");
  }
  static const std::vector<std::string> known = {
      "input_data_size", "bandwidth",      "deadline",     "mus_per_cell",
      "compute_budget",  "topology",       "theta_weights"};
  if (std::find(known.begin(), known.end(), spec.param) == known.end()) {
    throw std::invalid_argument("unknown sweep parameter: " + spec.param);
  }
  for (const auto& a : spec.algorithms) {
    if (a != "gtda" && a != "gojra" && a != "hoda") {
      throw std::invalid_argument("unknown algorithm: " + a);
    }
  }
  return spec;
}

Json sweep_spec_to_json(const SweepSpec& spec) {
  Json j;
  j["param"] = spec.param;
  j["values"] = spec.values;
  j["algorithms"] = spec.algorithms;
  j["seeds"] = spec.seeds;
  j["config"] = config_to_json(spec.base);
  j["threads"] = spec.threads;
  return j;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& param,
                                 const Json& value) {
  ScenarioConfig c = base;
  if (param == "input_data_size") {
    c.u_bits = value.get<double>();
  } else if (param == "bandwidth") {
    c.bandwidth_hz = value.get<double>();
  } else if (param == "deadline") {
    c.deadline_s = value.get<double>();
  } else if (param == "mus_per_cell") {
    c.mus_per_cell = value.get<int>();
    c.mus_per_cell_list.clear();
  } else if (param == "compute_budget") {
    c.compute_budget_usd = value.get<double>();
  } else if (param == "topology") {
    c.topology = topology_from_string(value.get<std::string>());
    if (c.topology == TopologyKind::MeshCenterCloud && c.core_servers == 0) c.core_servers = 1;
    if (c.topology != TopologyKind::MeshCenterCloud) c.core_servers = 0;
  } else if (param == "theta_weights") {
    const std::string s = value.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) throw std::invalid_argument("theta_weights value must be tx/cp");
    c.theta_tx = std::stod(s.substr(0, slash));
    c.theta_cp = std::stod(s.substr(slash + 1));
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + param);
  }
  return c;
}

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string sweep_value_label(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return format_number(value.get<double>());
}

RunMetrics run_algorithm(const Scenario& scenario, const std::string& algo,
                         Assignment* assignment_out, Json* report_out, Json* trace_out) {
  RunMetrics metrics;
  Assignment assignment;
  SolutionReport report;
  if (algo == "gtda") {
    auto result = solve_jcora(scenario);
    assignment = std::move(result.assignment);
    report = std::move(result.report);
    if (trace_out) *trace_out = trace_to_json(result.trace);
  } else if (algo == "gojra") {
    auto result = solve_gojra(scenario);
    assignment = std::move(result.assignment);
    report = std::move(result.report);
    if (trace_out) *trace_out = Json::object();
  } else if (algo == "hoda") {
    auto result = solve_hoda(scenario);
    assignment = std::move(result.assignment);
    report = std::move(result.report);
    if (trace_out) *trace_out = Json::object();
  } else {
    throw std::invalid_argument("unknown algorithm: " + algo);
  }

  metrics.objective = report.objective;
  metrics.feasible = report.feasible;
  metrics.objective_trace = report.objective_trace;

  double energy = 0;
  double offloaded_bits = 0;
  int flat = 0;
  for (const auto& mu : scenario.mus) {
    for (const auto& req : mu.requests) {
      const auto& ra = assignment.requests[static_cast<std::size_t>(flat++)];
      if (ra.offloaded) {
        const auto quote = uplink_quote(scenario, mu, req);
        energy += quote.energy_j;
        offloaded_bits += req.data_fraction * mu.input_bits;
      } else {
        energy += local_exec(mu, req, ra.local_clock_hz).energy_j;
      }
    }
  }
  metrics.avg_energy_j = scenario.mus.empty() ? 0 : energy / static_cast<double>(scenario.mus.size());
  metrics.offloaded_bits = offloaded_bits;

  if (assignment_out) *assignment_out = std::move(assignment);
  if (report_out) *report_out = report_to_json(report);
  return metrics;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  struct Cell {
    std::size_t value_idx;
    std::string algo;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    for (const auto& algo : spec.algorithms) {
      for (const auto seed : spec.seeds) cells.push_back({v, algo, seed});
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const int thread_count = spec.threads > 0
                               ? spec.threads
                               : std::max(1u, std::thread::hardware_concurrency());

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const auto& cell = cells[i];
      SweepRow row;
      row.param = spec.param;
      row.value = sweep_value_label(spec.values[cell.value_idx]);
      row.algo = cell.algo;
      row.seed = std::to_string(cell.seed);
      try {
        const auto config = apply_sweep_value(spec.base, spec.param, spec.values[cell.value_idx]);
        row.topology = to_string(config.topology);
        const auto scenario = generate_scenario(config, cell.seed);
        const auto metrics = run_algorithm(scenario, cell.algo);
        row.objective = metrics.objective;
        row.avg_energy_j = metrics.avg_energy_j;
        row.offloaded_bits = metrics.offloaded_bits;
        row.feasible = metrics.feasible;
      } catch (const std::exception& e) {
        row.failed = true;
        row.feasible = false;
        row.objective = std::nan("");
        row.avg_energy_j = std::nan("");
        row.offloaded_bits = std::nan("");
        row.error = e.what();
      }
      rows[i] = std::move(row);
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Canonical order is the cell enumeration order (value, algo, seed), which
  // the construction above already provides. Aggregate rows follow.
  std::vector<SweepRow> out = rows;
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    for (const auto& algo : spec.algorithms) {
      SweepRow agg;
      agg.param = spec.param;
      agg.value = sweep_value_label(spec.values[v]);
      agg.algo = algo;
      agg.seed = "mean";
      double n = 0, obj = 0, energy = 0, bits = 0, obj_sq = 0;
      bool all_feasible = true;
      for (const auto& row : rows) {
        if (row.value != agg.value || row.algo != algo || row.failed) continue;
        agg.topology = row.topology;
        obj += row.objective;
        obj_sq += row.objective * row.objective;
        energy += row.avg_energy_j;
        bits += row.offloaded_bits;
        all_feasible = all_feasible && row.feasible;
        n += 1;
      }
      if (n == 0) {
        agg.failed = true;
        agg.objective = agg.avg_energy_j = agg.offloaded_bits = std::nan("");
        agg.feasible = false;
      } else {
        agg.objective = obj / n;
        agg.avg_energy_j = energy / n;
        agg.offloaded_bits = bits / n;
        agg.feasible = all_feasible;
        agg.objective_std = n > 1 ? std::sqrt(std::max(0.0, obj_sq / n - agg.objective * agg.objective))
                                  : 0.0;
      }
      out.push_back(std::move(agg));
    }
  }
  return out;
}

void emit_results(const std::vector<SweepRow>& rows, const std::string& path,
                  const Json& spec_echo) {
  if (rows.empty()) throw std::invalid_argument("emit_results: empty table");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_results: cannot write " + path);
  out << "param,value,algo,topology,seed,objective,avg_energy_J,offloaded_bits,feasible\n";
  for (const auto& row : rows) {
    out << row.param << ',' << row.value << ',' << row.algo << ',' << row.topology << ','
        << row.seed << ',' << format_number(row.objective) << ','
        << format_number(row.avg_energy_j) << ',' << format_number(row.offloaded_bits) << ','
        << (row.feasible ? "true" : "false") << '\n';
  }
  if (!out) throw std::runtime_error("emit_results: write failed for " + path);
  out.close();

  Json meta;
  meta["version"] = version_string();
  meta["spec"] = spec_echo;
  Json aggregates = Json::array();
  for (const auto& row : rows) {
    if (row.seed != "mean") continue;
    aggregates.push_back(Json{{"value", row.value},
                              {"algo", row.algo},
                              {"objective_mean", row.objective},
                              {"objective_std", row.objective_std}});
  }
  meta["aggregates"] = aggregates;
  Json failures = Json::array();
  for (const auto& row : rows) {
    if (row.failed && row.seed != "mean") {
      failures.push_back(Json{{"value", row.value}, {"algo", row.algo}, {"seed", row.seed},
                              {"error", row.error}});
    }
  }
  meta["failures"] = failures;
  write_json_file(path + ".meta.json", meta);
}

std::vector<SweepRow> parse_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_results: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_results: empty file");
  if (line != "param,value,algo,topology,seed,objective,avg_energy_J,offloaded_bits,feasible") {
    throw std::runtime_error("parse_results: unexpected header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw std::runtime_error("parse_results: malformed row");
    SweepRow row;
    row.param = fields[0];
    row.value = fields[1];
    row.algo = fields[2];
    row.topology = fields[3];
    row.seed = fields[4];
    row.objective = std::stod(fields[5]);
    row.avg_energy_j = std::stod(fields[6]);
    row.offloaded_bits = std::stod(fields[7]);
    row.feasible = fields[8] == "true";
    row.failed = std::isnan(row.objective);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mecsfc
