#include "mecsfc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mecsfc/rng.hpp"

namespace mecsfc {

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double ServiceRequest::stage_cycles(int stage, double input_bits) const {
  const auto& st = chain.at(static_cast<std::size_t>(stage));
  return data_fraction * st.data_ratio * input_bits * st.cycles_per_bit;
}

double ServiceRequest::total_cycles(double input_bits) const {
  double total = 0;
  for (int l = 0; l < static_cast<int>(chain.size()); ++l) total += stage_cycles(l, input_bits);
  return total;
}

void BackhaulGraph::rebuild_index() {
  const int n = static_cast<int>(nodes.size());
  delay_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), -1.0));
  in_neighbors_.assign(static_cast<std::size_t>(n), {});
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw std::invalid_argument("backhaul edge references unknown node");
    }
    delay_[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)] = e.setup_delay_s;
  }
  for (int v = 0; v < n; ++v) {
    for (int x = 0; x < n; ++x) {
      if (delay_[static_cast<std::size_t>(x)][static_cast<std::size_t>(v)] > 0) {
        in_neighbors_[static_cast<std::size_t>(v)].push_back(x);
      }
    }
  }
}

bool BackhaulGraph::connected(int x, int y) const {
  if (x < 0 || y < 0 || x >= static_cast<int>(nodes.size()) || y >= static_cast<int>(nodes.size())) return false;
  return delay_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] > 0;
}

double BackhaulGraph::setup_delay(int x, int y) const {
  if (!connected(x, y)) throw std::invalid_argument("setup_delay: servers not connected");
  return delay_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
}

const std::vector<int>& BackhaulGraph::in_neighbors(int v) const {
  return in_neighbors_.at(static_cast<std::size_t>(v));
}

std::vector<int> BackhaulGraph::out_neighbors(int v) const {
  std::vector<int> out;
  for (int y = 0; y < static_cast<int>(nodes.size()); ++y) {
    if (connected(v, y)) out.push_back(y);
  }
  return out;
}

bool BackhaulGraph::supports(int node, int function_id) const {
  const auto& bl = nodes.at(static_cast<std::size_t>(node)).blacklist;
  return std::find(bl.begin(), bl.end(), function_id) == bl.end();
}

double BackhaulGraph::uniform_hop_delay() const {
  double worst = 0;
  for (const auto& e : edges) worst = std::max(worst, e.setup_delay_s);
  return worst;
}

int BackhaulGraph::edge_server_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.edge_server ? 1 : 0;
  return n;
}

void BackhaulGraph::validate() const {
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (nodes[static_cast<std::size_t>(i)].id != i) throw std::invalid_argument("backhaul node ids must be 0..n-1");
    if (nodes[static_cast<std::size_t>(i)].capacity_hz <= 0) throw std::invalid_argument("server capacity must be positive");
  }
  for (const auto& e : edges) {
    if (e.setup_delay_s <= 0) throw std::invalid_argument("setup delay must be positive");
    if (e.from == e.to) throw std::invalid_argument("self edges are not allowed");
  }
  if (delay_.size() != nodes.size()) throw std::logic_error("backhaul index not built");
  // In-neighbor sets must match the edge list.
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    for (int x : in_neighbors(v)) {
      if (!connected(x, v)) throw std::logic_error("in-neighbor index inconsistent");
    }
  }
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::FullMesh: return "full_mesh";
    case TopologyKind::Ring: return "ring";
    case TopologyKind::MeshCenterCloud: return "mesh_center_cloud";
    case TopologyKind::MeshCenterBS: return "mesh_center_bs";
  }
  throw std::logic_error("unknown topology kind");
}

TopologyKind topology_from_string(const std::string& name) {
  if (name == "full_mesh") return TopologyKind::FullMesh;
  if (name == "ring") return TopologyKind::Ring;
  if (name == "mesh_center_cloud") return TopologyKind::MeshCenterCloud;
  if (name == "mesh_center_bs") return TopologyKind::MeshCenterBS;
  throw std::invalid_argument("unknown topology: " + name);
}

namespace {

void add_link(BackhaulGraph& g, int a, int b, double delay) {
  g.edges.push_back({a, b, delay});
  g.edges.push_back({b, a, delay});
}

}  // namespace

BackhaulGraph build_topology(TopologyKind kind, int n_edge_servers, int n_core_servers,
                             double setup_delay_s,
                             const std::vector<double>& edge_capacities_hz,
                             const std::vector<double>& core_capacities_hz) {
  if (n_edge_servers < 1) throw std::invalid_argument("need at least one edge server");
  if (n_core_servers < 0) throw std::invalid_argument("negative core server count");
  if (setup_delay_s <= 0) throw std::invalid_argument("setup delay must be positive");
  if (edge_capacities_hz.empty()) throw std::invalid_argument("empty edge capacity list");
  if (n_core_servers > 0 && core_capacities_hz.empty()) {
    throw std::invalid_argument("empty core capacity list");
  }

  BackhaulGraph g;
  for (int i = 0; i < n_edge_servers; ++i) {
    g.nodes.push_back({i, edge_capacities_hz[static_cast<std::size_t>(i) % edge_capacities_hz.size()], true, {}});
  }
  for (int i = 0; i < n_core_servers; ++i) {
    g.nodes.push_back({n_edge_servers + i,
                       core_capacities_hz[static_cast<std::size_t>(i) % core_capacities_hz.size()], false, {}});
  }
  const int total = n_edge_servers + n_core_servers;

  switch (kind) {
    case TopologyKind::FullMesh:
      for (int a = 0; a < total; ++a) {
        for (int b = a + 1; b < total; ++b) add_link(g, a, b, setup_delay_s);
      }
      break;
    case TopologyKind::Ring: {
      if (n_core_servers > 0) throw std::invalid_argument("ring topology takes no core servers");
      if (n_edge_servers < 3) throw std::invalid_argument("ring needs at least 3 servers");
      for (int a = 0; a < n_edge_servers; ++a) add_link(g, a, (a + 1) % n_edge_servers, setup_delay_s);
      break;
    }
    case TopologyKind::MeshCenterCloud: {
      if (n_core_servers < 1) throw std::invalid_argument("mesh_center_cloud needs a core server");
      for (int c = 0; c < n_core_servers; ++c) {
        for (int a = 0; a < n_edge_servers; ++a) add_link(g, n_edge_servers + c, a, setup_delay_s);
      }
      break;
    }
    case TopologyKind::MeshCenterBS: {
      int hub = 0;
      for (int a = 1; a < n_edge_servers; ++a) {
        if (g.nodes[static_cast<std::size_t>(a)].capacity_hz > g.nodes[static_cast<std::size_t>(hub)].capacity_hz) hub = a;
      }
      for (int a = 0; a < total; ++a) {
        if (a != hub) add_link(g, hub, a, setup_delay_s);
      }
      break;
    }
  }

  g.rebuild_index();
  g.validate();
  return g;
}

void ScenarioConfig::validate() const {
  if (edge_servers < 1) throw std::invalid_argument("edge_servers must be >= 1");
  if (setup_delay_s <= 0) throw std::invalid_argument("setup_delay_s must be positive");
  if (cell_spacing_m <= 0 || bandwidth_hz <= 0 || pathloss_exponent <= 0) {
    throw std::invalid_argument("cell parameters must be positive");
  }
  if (mus_per_cell < 0 || requests_per_mu < 0) throw std::invalid_argument("negative counts");
  if (mu_distance_min_m <= 0 || mu_distance_max_m < mu_distance_min_m) {
    throw std::invalid_argument("bad user distance range");
  }
  if (mu_clock_set_hz.empty()) throw std::invalid_argument("empty mu clock set");
  if (u_bits < 0 || deadline_s <= 0 || kappa <= 0 || tx_power_w < 0) {
    throw std::invalid_argument("bad user parameters");
  }
  if (energy_budget_j <= 0 || compute_budget_usd <= 0) throw std::invalid_argument("budgets must be positive");
  if (theta_tx < 0 || theta_cp < 0 || std::abs(theta_tx + theta_cp - 1.0) > 1e-12) {
    throw std::invalid_argument("weights must be nonnegative and sum to 1");
  }
  if (chain_length_choices.empty() || chain_length_choices.size() != chain_length_weights.size()) {
    throw std::invalid_argument("chain length choices/weights mismatch");
  }
  for (int len : chain_length_choices) {
    if (len < 1 || len > function_catalog) throw std::invalid_argument("chain length out of range");
    if (len > 15) throw std::invalid_argument("chain length too large");
  }
  if (cycles_per_bit_min <= 0 || cycles_per_bit_max < cycles_per_bit_min) {
    throw std::invalid_argument("bad cycles-per-bit range");
  }
  if (output_ratio_min <= 0 || output_ratio_max < output_ratio_min) {
    throw std::invalid_argument("bad output ratio range");
  }
  if (antenna_factor < 8) throw std::invalid_argument("antenna_factor must keep M_s >= 8 |K_s|");
  if (!zeta_fractions.empty()) {
    if (static_cast<int>(zeta_fractions.size()) != requests_per_mu) {
      throw std::invalid_argument("zeta_fractions length must match requests_per_mu");
    }
    double total = 0;
    for (double z : zeta_fractions) {
      if (z <= 0 || z > 1.0) throw std::invalid_argument("each zeta must be in (0, 1]");
      total += z;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("zeta fractions must sum to at most 1");
  }
  if (!mus_per_cell_list.empty() && static_cast<int>(mus_per_cell_list.size()) != edge_servers) {
    throw std::invalid_argument("mus_per_cell_list length must match edge_servers");
  }
}

int Scenario::request_count() const {
  int n = 0;
  for (const auto& mu : mus) n += static_cast<int>(mu.requests.size());
  return n;
}

std::pair<int, int> Scenario::locate_request(int flat_id) const {
  for (int m = 0; m < static_cast<int>(mus.size()); ++m) {
    for (int r = 0; r < static_cast<int>(mus[static_cast<std::size_t>(m)].requests.size()); ++r) {
      if (mus[static_cast<std::size_t>(m)].requests[static_cast<std::size_t>(r)].id == flat_id) return {m, r};
    }
  }
  throw std::out_of_range("unknown request id");
}

const MobileUser& Scenario::request_owner(int flat_id) const {
  return mus.at(static_cast<std::size_t>(locate_request(flat_id).first));
}

const ServiceRequest& Scenario::request(int flat_id) const {
  auto [m, r] = locate_request(flat_id);
  return mus.at(static_cast<std::size_t>(m)).requests.at(static_cast<std::size_t>(r));
}

int Scenario::home_server(int flat_id) const { return request_owner(flat_id).cell; }

void Scenario::validate() const {
  graph.validate();
  if (static_cast<int>(cells.size()) != graph.edge_server_count()) {
    throw std::invalid_argument("one cell per edge server expected");
  }
  if (theta_tx < 0 || theta_cp < 0 || std::abs(theta_tx + theta_cp - 1.0) > 1e-12) {
    throw std::invalid_argument("weights must be nonnegative and sum to 1");
  }
  std::vector<int> seen(mus.size(), 0);
  for (const auto& cell : cells) {
    if (cell.bandwidth_hz <= 0) throw std::invalid_argument("cell bandwidth must be positive");
    if (cell.antennas < 8 * static_cast<int>(cell.mu_ids.size())) {
      throw std::invalid_argument("antenna count must dominate the served user count");
    }
    for (int id : cell.mu_ids) {
      if (id < 0 || id >= static_cast<int>(mus.size())) throw std::invalid_argument("bad mu id");
      if (seen[static_cast<std::size_t>(id)]++) throw std::invalid_argument("mu assigned to two cells");
      if (mus[static_cast<std::size_t>(id)].cell != cell.id) throw std::invalid_argument("mu/cell mismatch");
    }
  }
  for (int used : seen) {
    if (!used) throw std::invalid_argument("mu not assigned to any cell");
  }
  int next_flat = 0;
  for (const auto& mu : mus) {
    if (mu.max_clock_hz <= 0 || mu.deadline_s <= 0 || mu.energy_budget_j <= 0 ||
        mu.compute_budget_usd <= 0 || mu.kappa <= 0) {
      throw std::invalid_argument("bad mobile user parameters");
    }
    double zeta_total = 0;
    for (const auto& req : mu.requests) {
      if (req.id != next_flat++) throw std::invalid_argument("request ids must be flat and ordered");
      if (req.chain.empty()) throw std::invalid_argument("empty function chain");
      zeta_total += req.data_fraction;
      double running = 1.0;
      for (const auto& st : req.chain) {
        if (st.cycles_per_bit <= 0 || st.output_ratio <= 0 || st.data_ratio <= 0) {
          throw std::invalid_argument("bad chain stage parameters");
        }
        if (std::abs(st.data_ratio - running) > 1e-9 * running) {
          throw std::invalid_argument("data ratio must be the product of upstream output ratios");
        }
        running *= st.output_ratio;
      }
    }
    if (zeta_total > 1.0 + 1e-12) throw std::invalid_argument("request data fractions exceed the input");
  }
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();

  Scenario s;
  s.graph = build_topology(config.topology, config.edge_servers, config.core_servers,
                           config.setup_delay_s, config.server_capacities_hz,
                           config.core_capacities_hz);
  for (const auto& [server, blocked] : config.function_blacklist) {
    if (server < 0 || server >= static_cast<int>(s.graph.nodes.size())) {
      throw std::invalid_argument("function blacklist references unknown server");
    }
    s.graph.nodes[static_cast<std::size_t>(server)].blacklist = blocked;
  }
  s.pathloss_exponent = config.pathloss_exponent;
  s.theta_tx = config.theta_tx;
  s.theta_cp = config.theta_cp;
  s.price_eta = config.price_eta;
  s.price_vartheta = config.price_vartheta;
  s.beta_mu_weight = config.beta_mu_weight;
  s.sir_cap = config.sir_cap;
  s.rng_seed = seed;

  const Rng root(seed);

  // Cells sit on a square grid, row-major, one per edge server.
  const int n_cells = config.edge_servers;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_cells))));
  for (int c = 0; c < n_cells; ++c) {
    Cell cell;
    cell.id = c;
    cell.position = {static_cast<double>(c % cols) * config.cell_spacing_m,
                     static_cast<double>(c / cols) * config.cell_spacing_m};
    cell.bandwidth_hz = config.bandwidth_hz;
    s.cells.push_back(cell);
  }

  // Substreams (documented here; names are load-bearing for reproducibility):
  //   mu_radius(cell, k), mu_angle(cell, k), mu_clock(cell, k)
  //   chain_len(flat), func_id(flat, stage), cycles(flat, stage), out_ratio(flat, stage)
  int flat_id = 0;
  for (int c = 0; c < n_cells; ++c) {
    const int mu_count = config.mus_per_cell_list.empty()
                             ? config.mus_per_cell
                             : config.mus_per_cell_list[static_cast<std::size_t>(c)];
    auto& cell = s.cells[static_cast<std::size_t>(c)];
    cell.antennas = std::max(config.antenna_factor * mu_count, config.antenna_factor);
    for (int k = 0; k < mu_count; ++k) {
      MobileUser mu;
      mu.cell = c;
      mu.index = k;
      const double radius = root.stream("mu_radius", static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(k))
                                .uniform(config.mu_distance_min_m, config.mu_distance_max_m);
      const double angle = root.stream("mu_angle", static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(k))
                               .uniform(0.0, 2.0 * std::numbers::pi);
      mu.position = {cell.position.x + radius * std::cos(angle),
                     cell.position.y + radius * std::sin(angle)};
      {
        auto rng = root.stream("mu_clock", static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(k));
        mu.max_clock_hz = rng.pick(std::span<const double>(config.mu_clock_set_hz));
      }
      mu.kappa = config.kappa;
      mu.input_bits = config.u_bits;
      mu.deadline_s = config.deadline_s;
      mu.energy_budget_j = config.energy_budget_j;
      mu.compute_budget_usd = config.compute_budget_usd;
      mu.tx_power_w = config.tx_power_w;

      for (int r = 0; r < config.requests_per_mu; ++r) {
        ServiceRequest req;
        req.id = flat_id;
        req.data_fraction = config.zeta_fractions.empty()
                                ? 1.0 / static_cast<double>(config.requests_per_mu)
                                : config.zeta_fractions[static_cast<std::size_t>(r)];
        int length = config.chain_length_choices.front();
        if (config.chain_length_choices.size() > 1) {
          auto rng = root.stream("chain_len", static_cast<std::uint64_t>(flat_id));
          length = config.chain_length_choices[static_cast<std::size_t>(
              rng.pick_weighted(std::span<const double>(config.chain_length_weights)))];
        }
        double running = 1.0;
        std::vector<int> used_ids;
        for (int l = 0; l < length; ++l) {
          FunctionStage st;
          {
            auto rng = root.stream("func_id", static_cast<std::uint64_t>(flat_id), static_cast<std::uint64_t>(l));
            int fid = rng.uniform_int(0, config.function_catalog - 1);
            while (std::find(used_ids.begin(), used_ids.end(), fid) != used_ids.end()) {
              fid = rng.uniform_int(0, config.function_catalog - 1);
            }
            st.function_id = fid;
            used_ids.push_back(fid);
          }
          st.cycles_per_bit = root.stream("cycles", static_cast<std::uint64_t>(flat_id), static_cast<std::uint64_t>(l))
                                  .uniform(config.cycles_per_bit_min, config.cycles_per_bit_max);
          st.output_ratio = root.stream("out_ratio", static_cast<std::uint64_t>(flat_id), static_cast<std::uint64_t>(l))
                                .uniform(config.output_ratio_min, config.output_ratio_max);
          st.data_ratio = running;
          running *= st.output_ratio;
          req.chain.push_back(st);
        }
        mu.requests.push_back(std::move(req));
        ++flat_id;
      }

      cell.mu_ids.push_back(static_cast<int>(s.mus.size()));
      s.mus.push_back(std::move(mu));
    }
  }

  s.validate();
  return s;
}

}  // namespace mecsfc
