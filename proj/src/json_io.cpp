#include "mecsfc/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace mecsfc {

namespace {

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig config_from_json(const Json& j) {
  ScenarioConfig c;
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    if (t.contains("kind")) c.topology = topology_from_string(t.at("kind").get<std::string>());
    read(t, "edge_servers", c.edge_servers);
    read(t, "core_servers", c.core_servers);
    read(t, "setup_delay_s", c.setup_delay_s);
    read(t, "server_capacities_hz", c.server_capacities_hz);
    read(t, "core_capacities_hz", c.core_capacities_hz);
    if (t.contains("function_blacklist")) {
      c.function_blacklist.clear();
      for (const auto& [key, value] : t.at("function_blacklist").items()) {
        c.function_blacklist[std::stoi(key)] = value.get<std::vector<int>>();
      }
    }
  }
  if (j.contains("cells")) {
    const auto& t = j.at("cells");
    read(t, "spacing_m", c.cell_spacing_m);
    read(t, "bandwidth_hz", c.bandwidth_hz);
    read(t, "pathloss_exponent", c.pathloss_exponent);
    read(t, "antenna_factor", c.antenna_factor);
    if (t.contains("sir_cap") && !t.at("sir_cap").is_null()) {
      c.sir_cap = t.at("sir_cap").get<double>();
    }
  }
  read(j, "mus_per_cell", c.mus_per_cell);
  read(j, "mus_per_cell_list", c.mus_per_cell_list);
  read(j, "requests_per_mu", c.requests_per_mu);
  read(j, "zeta_fractions", c.zeta_fractions);
  read(j, "u_bits", c.u_bits);
  read(j, "deadline_s", c.deadline_s);
  if (j.contains("mu")) {
    const auto& t = j.at("mu");
    read(t, "distance_min_m", c.mu_distance_min_m);
    read(t, "distance_max_m", c.mu_distance_max_m);
    read(t, "clock_set_hz", c.mu_clock_set_hz);
    read(t, "kappa", c.kappa);
    read(t, "tx_power_w", c.tx_power_w);
  }
  if (j.contains("chain")) {
    const auto& t = j.at("chain");
    read(t, "length_choices", c.chain_length_choices);
    read(t, "length_weights", c.chain_length_weights);
    read(t, "cycles_per_bit_min", c.cycles_per_bit_min);
    read(t, "cycles_per_bit_max", c.cycles_per_bit_max);
    read(t, "output_ratio_min", c.output_ratio_min);
    read(t, "output_ratio_max", c.output_ratio_max);
    read(t, "function_catalog", c.function_catalog);
  }
  if (j.contains("budgets")) {
    const auto& t = j.at("budgets");
    read(t, "energy_j", c.energy_budget_j);
    read(t, "compute_usd", c.compute_budget_usd);
  }
  if (j.contains("price")) {
    const auto& t = j.at("price");
    read(t, "eta", c.price_eta);
    read(t, "vartheta", c.price_vartheta);
  }
  if (j.contains("weights")) {
    const auto& t = j.at("weights");
    read(t, "theta_tx", c.theta_tx);
    read(t, "theta_cp", c.theta_cp);
  }
  read(j, "beta_mu_weight", c.beta_mu_weight);
  c.validate();
  return c;
}

Json config_to_json(const ScenarioConfig& c) {
  Json j;
  Json topo;
  topo["kind"] = to_string(c.topology);
  topo["edge_servers"] = c.edge_servers;
  topo["core_servers"] = c.core_servers;
  topo["setup_delay_s"] = c.setup_delay_s;
  topo["server_capacities_hz"] = c.server_capacities_hz;
  topo["core_capacities_hz"] = c.core_capacities_hz;
  Json blacklist = Json::object();
  for (const auto& [server, blocked] : c.function_blacklist) {
    blacklist[std::to_string(server)] = blocked;
  }
  topo["function_blacklist"] = blacklist;
  j["topology"] = topo;

  Json cells;
  cells["spacing_m"] = c.cell_spacing_m;
  cells["bandwidth_hz"] = c.bandwidth_hz;
  cells["pathloss_exponent"] = c.pathloss_exponent;
  cells["antenna_factor"] = c.antenna_factor;
  if (c.sir_cap) cells["sir_cap"] = *c.sir_cap;
  j["cells"] = cells;

  j["mus_per_cell"] = c.mus_per_cell;
  if (!c.mus_per_cell_list.empty()) j["mus_per_cell_list"] = c.mus_per_cell_list;
  j["requests_per_mu"] = c.requests_per_mu;
  if (!c.zeta_fractions.empty()) j["zeta_fractions"] = c.zeta_fractions;
  j["u_bits"] = c.u_bits;
  j["deadline_s"] = c.deadline_s;

  Json mu;
  mu["distance_min_m"] = c.mu_distance_min_m;
  mu["distance_max_m"] = c.mu_distance_max_m;
  mu["clock_set_hz"] = c.mu_clock_set_hz;
  mu["kappa"] = c.kappa;
  mu["tx_power_w"] = c.tx_power_w;
  j["mu"] = mu;

  Json chain;
  chain["length_choices"] = c.chain_length_choices;
  chain["length_weights"] = c.chain_length_weights;
  chain["cycles_per_bit_min"] = c.cycles_per_bit_min;
  chain["cycles_per_bit_max"] = c.cycles_per_bit_max;
  chain["output_ratio_min"] = c.output_ratio_min;
  chain["output_ratio_max"] = c.output_ratio_max;
  chain["function_catalog"] = c.function_catalog;
  j["chain"] = chain;

  j["budgets"] = Json{{"energy_j", c.energy_budget_j}, {"compute_usd", c.compute_budget_usd}};
  j["price"] = Json{{"eta", c.price_eta}, {"vartheta", c.price_vartheta}};
  j["weights"] = Json{{"theta_tx", c.theta_tx}, {"theta_cp", c.theta_cp}};
  j["beta_mu_weight"] = c.beta_mu_weight;
  return j;
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  Json graph;
  Json nodes = Json::array();
  for (const auto& node : s.graph.nodes) {
    Json n;
    n["id"] = node.id;
    n["capacity_hz"] = node.capacity_hz;
    n["edge_server"] = node.edge_server;
    n["blacklist"] = node.blacklist;
    nodes.push_back(n);
  }
  graph["nodes"] = nodes;
  Json edges = Json::array();
  for (const auto& edge : s.graph.edges) {
    edges.push_back(Json{{"from", edge.from}, {"to", edge.to}, {"setup_delay_s", edge.setup_delay_s}});
  }
  graph["edges"] = edges;
  j["graph"] = graph;

  Json cells = Json::array();
  for (const auto& cell : s.cells) {
    Json c;
    c["id"] = cell.id;
    c["position"] = Json{{"x", cell.position.x}, {"y", cell.position.y}};
    c["antennas"] = cell.antennas;
    c["bandwidth_hz"] = cell.bandwidth_hz;
    c["mu_ids"] = cell.mu_ids;
    cells.push_back(c);
  }
  j["cells"] = cells;

  Json mus = Json::array();
  for (const auto& mu : s.mus) {
    Json m;
    m["cell"] = mu.cell;
    m["index"] = mu.index;
    m["position"] = Json{{"x", mu.position.x}, {"y", mu.position.y}};
    m["max_clock_hz"] = mu.max_clock_hz;
    m["kappa"] = mu.kappa;
    m["input_bits"] = mu.input_bits;
    m["deadline_s"] = mu.deadline_s;
    m["energy_budget_j"] = mu.energy_budget_j;
    m["compute_budget_usd"] = mu.compute_budget_usd;
    m["tx_power_w"] = mu.tx_power_w;
    Json requests = Json::array();
    for (const auto& req : mu.requests) {
      Json r;
      r["id"] = req.id;
      r["data_fraction"] = req.data_fraction;
      Json chain = Json::array();
      for (const auto& st : req.chain) {
        chain.push_back(Json{{"function_id", st.function_id},
                             {"cycles_per_bit", st.cycles_per_bit},
                             {"output_ratio", st.output_ratio},
                             {"data_ratio", st.data_ratio}});
      }
      r["chain"] = chain;
      requests.push_back(r);
    }
    m["requests"] = requests;
    mus.push_back(m);
  }
  j["mus"] = mus;

  j["pathloss_exponent"] = s.pathloss_exponent;
  j["theta_tx"] = s.theta_tx;
  j["theta_cp"] = s.theta_cp;
  j["price_eta"] = s.price_eta;
  j["price_vartheta"] = s.price_vartheta;
  j["beta_mu_weight"] = s.beta_mu_weight;
  if (s.sir_cap) j["sir_cap"] = *s.sir_cap;
  j["rng_seed"] = s.rng_seed;
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  for (const auto& n : j.at("graph").at("nodes")) {
    BackhaulNode node;
    node.id = n.at("id").get<int>();
    node.capacity_hz = n.at("capacity_hz").get<double>();
    node.edge_server = n.at("edge_server").get<bool>();
    node.blacklist = n.at("blacklist").get<std::vector<int>>();
    s.graph.nodes.push_back(node);
  }
  for (const auto& e : j.at("graph").at("edges")) {
    s.graph.edges.push_back({e.at("from").get<int>(), e.at("to").get<int>(),
                             e.at("setup_delay_s").get<double>()});
  }
  s.graph.rebuild_index();

  for (const auto& c : j.at("cells")) {
    Cell cell;
    cell.id = c.at("id").get<int>();
    cell.position = {c.at("position").at("x").get<double>(), c.at("position").at("y").get<double>()};
    cell.antennas = c.at("antennas").get<int>();
    cell.bandwidth_hz = c.at("bandwidth_hz").get<double>();
    cell.mu_ids = c.at("mu_ids").get<std::vector<int>>();
    s.cells.push_back(cell);
  }

  for (const auto& m : j.at("mus")) {
    MobileUser mu;
    mu.cell = m.at("cell").get<int>();
    mu.index = m.at("index").get<int>();
    mu.position = {m.at("position").at("x").get<double>(), m.at("position").at("y").get<double>()};
    mu.max_clock_hz = m.at("max_clock_hz").get<double>();
    mu.kappa = m.at("kappa").get<double>();
    mu.input_bits = m.at("input_bits").get<double>();
    mu.deadline_s = m.at("deadline_s").get<double>();
    mu.energy_budget_j = m.at("energy_budget_j").get<double>();
    mu.compute_budget_usd = m.at("compute_budget_usd").get<double>();
    mu.tx_power_w = m.at("tx_power_w").get<double>();
    for (const auto& r : m.at("requests")) {
      ServiceRequest req;
      req.id = r.at("id").get<int>();
      req.data_fraction = r.at("data_fraction").get<double>();
      for (const auto& st : r.at("chain")) {
        FunctionStage stage;
        stage.function_id = st.at("function_id").get<int>();
        stage.cycles_per_bit = st.at("cycles_per_bit").get<double>();
        stage.output_ratio = st.at("output_ratio").get<double>();
        stage.data_ratio = st.at("data_ratio").get<double>();
        req.chain.push_back(stage);
      }
      mu.requests.push_back(std::move(req));
    }
    s.mus.push_back(std::move(mu));
  }

  s.pathloss_exponent = j.at("pathloss_exponent").get<double>();
  s.theta_tx = j.at("theta_tx").get<double>();
  s.theta_cp = j.at("theta_cp").get<double>();
  s.price_eta = j.at("price_eta").get<double>();
  s.price_vartheta = j.at("price_vartheta").get<double>();
  s.beta_mu_weight = j.at("beta_mu_weight").get<double>();
  if (j.contains("sir_cap")) s.sir_cap = j.at("sir_cap").get<double>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  s.validate();
  return s;
}

Json assignment_to_json(const Assignment& assignment) {
  Json arr = Json::array();
  for (const auto& ra : assignment.requests) {
    Json r;
    r["offloaded"] = ra.offloaded;
    if (ra.offloaded) {
      r["placement"] = ra.placement;
      r["remote_clock_hz"] = ra.remote_clock_hz;
    } else {
      r["local_clock_hz"] = ra.local_clock_hz;
    }
    arr.push_back(r);
  }
  return Json{{"requests", arr}};
}

Assignment assignment_from_json(const Json& j) {
  Assignment a;
  for (const auto& r : j.at("requests")) {
    RequestAssignment ra;
    ra.offloaded = r.at("offloaded").get<bool>();
    if (ra.offloaded) {
      ra.placement = r.at("placement").get<std::vector<int>>();
      ra.remote_clock_hz = r.at("remote_clock_hz").get<std::vector<double>>();
    } else {
      ra.local_clock_hz = r.at("local_clock_hz").get<std::vector<double>>();
    }
    a.requests.push_back(std::move(ra));
  }
  return a;
}

Json feasibility_to_json(const FeasibilityReport& report) {
  Json constraints = Json::array();
  for (const auto& c : report.constraints) {
    constraints.push_back(Json{{"name", c.name},
                               {"ok", c.ok},
                               {"worst_violation", c.worst_violation},
                               {"detail", c.detail}});
  }
  return Json{{"feasible", report.feasible}, {"constraints", constraints}};
}

Json report_to_json(const SolutionReport& report) {
  Json j;
  j["objective"] = report.objective;
  j["feasible"] = report.feasible;
  Json per_mu = Json::array();
  for (const auto& mc : report.costs.per_mu) {
    per_mu.push_back(Json{{"mu", mc.mu_index},
                          {"total", mc.total},
                          {"local", mc.local_part},
                          {"offload", mc.offload_part},
                          {"per_request", mc.per_request}});
  }
  j["per_mu"] = per_mu;
  j["infeasible_requests"] = report.infeasible_requests;
  j["objective_trace"] = report.objective_trace;
  j["validation"] = feasibility_to_json(report.validation);
  return j;
}

Json trace_to_json(const SolverTrace& trace) {
  Json j;
  j["initial_objective"] = trace.initial_objective;
  Json iters = Json::array();
  for (const auto& it : trace.iterations) {
    iters.push_back(Json{{"request", it.request_id},
                         {"delta_z_estimate", it.delta_z_estimate},
                         {"objective_after", it.objective_after}});
  }
  j["iterations"] = iters;
  Json lambdas = Json::object();
  for (const auto& [flat, v] : trace.local_multiplier) lambdas[std::to_string(flat)] = v;
  j["local_multiplier"] = lambdas;
  Json mus = Json::object();
  for (const auto& [flat, v] : trace.price_multiplier) mus[std::to_string(flat)] = v;
  j["price_multiplier"] = mus;
  Json slack = Json::object();
  for (const auto& [flat, v] : trace.slack_budget_s) slack[std::to_string(flat)] = v;
  j["time_budget_s"] = slack;
  j["free_capacity_hz"] = trace.free_capacity_hz;
  Json ranking = Json::array();
  for (const auto& [server, metric] : trace.ranking) {
    ranking.push_back(Json{{"server", server}, {"metric", metric}});
  }
  j["ranking"] = ranking;
  j["reverted_requests"] = trace.reverted_requests;
  j["infeasible_requests"] = trace.infeasible_requests;
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace mecsfc
