#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mecsfc {

struct Vec2 {
  double x = 0;
  double y = 0;
};

double distance(const Vec2& a, const Vec2& b);

// One stage of a service function chain.
struct FunctionStage {
  int function_id = 0;
  double cycles_per_bit = 0;  // per-bit processing load of this function
  double output_ratio = 1.0;  // output/input ratio of this function alone
  double data_ratio = 1.0;    // fraction of the request input reaching this
                              // stage: product of upstream output ratios, 1
                              // for the first stage
};

struct ServiceRequest {
  int id = 0;                 // flat id, unique across the scenario
  double data_fraction = 0;   // share of the owner's total input handled here
  std::vector<FunctionStage> chain;

  // Per-stage computing load in cycles given the owner's input size.
  double stage_cycles(int stage, double input_bits) const;
  double total_cycles(double input_bits) const;
};

struct MobileUser {
  int cell = 0;   // serving cell / base-station server id
  int index = 0;  // position within the cell, used for co-channel pairing
  Vec2 position;
  double max_clock_hz = 0;
  double kappa = 0;             // local energy scale: e = data * kappa * f^2 per stage
  double input_bits = 0;        // total application input
  double deadline_s = 0;
  double energy_budget_j = 0;
  double compute_budget_usd = 0;
  double tx_power_w = 0;
  std::vector<ServiceRequest> requests;
};

struct Cell {
  int id = 0;  // equals the co-located edge server's node id
  Vec2 position;
  int antennas = 0;
  double bandwidth_hz = 0;
  std::vector<int> mu_ids;  // indices into Scenario::mus
};

struct BackhaulNode {
  int id = 0;
  double capacity_hz = 0;
  bool edge_server = false;
  std::vector<int> blacklist;  // function ids this server cannot host; empty = all supported
};

struct BackhaulEdge {
  int from = 0;
  int to = 0;
  double setup_delay_s = 0;
};

// Directed backhaul graph over computation servers. Links created by the
// topology builders are bidirectional (two directed edges per physical link).
class BackhaulGraph {
public:
  std::vector<BackhaulNode> nodes;
  std::vector<BackhaulEdge> edges;

  void rebuild_index();
  bool connected(int x, int y) const;        // directed edge x -> y exists
  double setup_delay(int x, int y) const;    // throws when not connected
  const std::vector<int>& in_neighbors(int v) const;
  std::vector<int> out_neighbors(int v) const;
  bool supports(int node, int function_id) const;
  double uniform_hop_delay() const;          // max setup delay, 0 when edgeless
  int edge_server_count() const;
  void validate() const;

private:
  std::vector<std::vector<double>> delay_;   // -1 marks "no edge"
  std::vector<std::vector<int>> in_neighbors_;
};

enum class TopologyKind { FullMesh, Ring, MeshCenterCloud, MeshCenterBS };

std::string to_string(TopologyKind kind);
TopologyKind topology_from_string(const std::string& name);

// Builds the backhaul graph for one of the named shapes. Edge servers get
// ids 0..n_edge-1, core servers follow. Capacities are taken cyclically from
// the given lists. FullMesh connects every server pair; Ring is a
// bidirectional cycle over the edge servers (no cores allowed, at least 3
// nodes); MeshCenterCloud is a star with the core servers as hub, each core
// linked to every edge server; MeshCenterBS designates the highest-capacity
// edge server as hub and links it to all other servers.
BackhaulGraph build_topology(TopologyKind kind, int n_edge_servers, int n_core_servers,
                             double setup_delay_s,
                             const std::vector<double>& edge_capacities_hz = {1.7e9, 3.6e9, 3.8e9, 4.5e9},
                             const std::vector<double>& core_capacities_hz = {1.0e10});

struct ScenarioConfig {
  // topology
  TopologyKind topology = TopologyKind::FullMesh;
  int edge_servers = 4;
  int core_servers = 0;
  double setup_delay_s = 0.010;
  std::vector<double> server_capacities_hz = {1.7e9, 3.6e9, 3.8e9, 4.5e9};
  std::vector<double> core_capacities_hz = {1.0e10};
  std::map<int, std::vector<int>> function_blacklist;  // server id -> blocked function ids

  // cells / radio
  double cell_spacing_m = 1600.0;
  double bandwidth_hz = 300e3;
  double pathloss_exponent = 3.8;
  int antenna_factor = 8;  // antennas per served user, keeps M_s >> |K_s|
  std::optional<double> sir_cap;  // SIR used when a user has no interferers

  // users
  int mus_per_cell = 8;
  std::vector<int> mus_per_cell_list;  // optional per-cell override
  double mu_distance_min_m = 100.0;
  double mu_distance_max_m = 800.0;
  std::vector<double> mu_clock_set_hz = {0.5e9, 0.6e9, 0.7e9, 0.8e9};
  double kappa = 1e-26;
  double tx_power_w = 5e-4;

  // requests
  int requests_per_mu = 5;
  std::vector<double> zeta_fractions;  // optional explicit split; default equal
  double u_bits = 0.8e6;
  double deadline_s = 0.8;
  std::vector<int> chain_length_choices = {1};
  std::vector<double> chain_length_weights = {1.0};
  double cycles_per_bit_min = 200.0;
  double cycles_per_bit_max = 500.0;
  double output_ratio_min = 0.5;
  double output_ratio_max = 1.0;
  int function_catalog = 8;

  // budgets / price / weights
  double energy_budget_j = 0.1;
  double compute_budget_usd = 0.035;
  double price_eta = 1.0;
  double price_vartheta = 2.5e-12;  // dollars per cycle at the reference clock
  double theta_tx = 0.8;
  double theta_cp = 0.2;
  double beta_mu_weight = 1.0;  // per-user weight in the clock allocation objective

  void validate() const;  // throws std::invalid_argument on bad values
};

struct Scenario {
  BackhaulGraph graph;
  std::vector<Cell> cells;
  std::vector<MobileUser> mus;
  double pathloss_exponent = 3.8;
  double theta_tx = 0.8;
  double theta_cp = 0.2;
  double price_eta = 1.0;
  double price_vartheta = 2.5e-12;
  double beta_mu_weight = 1.0;
  std::optional<double> sir_cap;
  std::uint64_t rng_seed = 0;

  int request_count() const;
  // Flat request id -> (mu index, request index within the user).
  std::pair<int, int> locate_request(int flat_id) const;
  const MobileUser& request_owner(int flat_id) const;
  const ServiceRequest& request(int flat_id) const;
  int home_server(int flat_id) const;

  void validate() const;
};

// Deterministic generation: identical (config, seed) pairs produce scenarios
// with identical canonical serializations.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace mecsfc
