#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mecsfc/assignment.hpp"
#include "mecsfc/costs.hpp"
#include "mecsfc/radio.hpp"
#include "mecsfc/scenario.hpp"

namespace mecsfc {

// Thrown by the clock-allocation stage when a fixed placement cannot fit any
// feasible per-server load.
struct capacity_error : std::runtime_error {
  int server;
  explicit capacity_error(int server_id, const std::string& what)
      : std::runtime_error(what), server(server_id) {}
};

// Energy-minimal local clock split that exhausts the deadline exactly.
// Stationarity gives f_l proportional to cycles_per_bit^(1/3); the common
// scale pins the summed stage delay at the deadline.
std::vector<double> local_allocation(const MobileUser& mu, const ServiceRequest& request);

// Deadline-tight multiplier associated with the allocation above (equal
// across stages); recorded in solver traces.
double local_allocation_multiplier(const MobileUser& mu, const ServiceRequest& request,
                                   std::span<const double> clocks_hz);

// Picks the requests a user keeps local: a knapsack over requests with item
// size = total allocated clock and unit value, packing as many requests as
// fit the user's clock capacity (ties prefer the smaller clock footprint).
// Returns one offload flag per request, aligned with mu.requests.
std::vector<bool> split_local_offload(const MobileUser& mu,
                                      const std::vector<std::vector<double>>& local_clocks_hz);

struct RemoteEstimate {
  std::vector<double> clock_hz;   // identical across the chain's stages
  double price_multiplier = 0;    // root of the delay-budget equation
  double slack_s = 0;             // deadline minus uplink and hop budget
};

// Clock estimate for an offloaded request before placement exists: clocks
// follow W((C exp(-eta) vartheta mu - 1)/e) + 1 in GHz with the multiplier
// chosen so the stage delays exactly fill the remaining delay budget.
// Throws std::runtime_error when the budget is not positive.
RemoteEstimate estimate_remote_alloc(const Scenario& scenario, const MobileUser& mu,
                                     const ServiceRequest& request, const UplinkQuote& uplink,
                                     double hop_budget_s);

struct PlacementResult {
  std::map<int, std::vector<int>> placement;  // flat request id -> per-stage host
  std::vector<int> reverted;                  // requests pushed back to local execution
  std::vector<double> free_capacity_hz;       // per server, net of placed estimates
  std::vector<std::pair<int, double>> ranking;  // (server, free/in-degree) of the spill phase
  int unplaced_stage_count = 0;               // stages still homeless before reverts
};

// Two-phase greedy placement: phase one packs each cell's offloaded stages
// onto its own base-station server; phase two walks the remaining servers in
// descending free-capacity-per-in-neighbor order and packs the still
// unplaced stages that keep the chain on connected hosts. Requests that
// cannot be fully placed are reverted to local execution.
PlacementResult place_functions_gtda(const Scenario& scenario,
                                     const std::vector<int>& offloaded_ids,
                                     const std::map<int, RemoteEstimate>& estimates);

struct SlaveResult {
  std::map<int, std::vector<double>> remote_clock_hz;
  std::map<int, std::vector<double>> time_budget_s;  // per-stage hop + compute budget
  double objective_usd = 0;                          // weighted compute cost
  double kkt_residual = 0;
  std::vector<double> server_load_hz;
  bool used_barrier = false;
};

// Final clock allocation for a fixed placement: minimizes the total weighted
// computing cost subject to per-request delay budgets (equality) and
// per-server capacity. Throws capacity_error when some server cannot host
// its assigned load within any feasible budget split.
SlaveResult solve_slave(const Scenario& scenario,
                        const std::map<int, std::vector<int>>& placement,
                        const std::vector<int>& offloaded_ids);

struct TraceIteration {
  int request_id = -1;
  double delta_z_estimate = 0;
  double objective_after = 0;
};

struct SolverTrace {
  double initial_objective = 0;
  std::vector<TraceIteration> iterations;      // accepted migrations, in order
  std::map<int, double> local_multiplier;      // deadline multiplier per request
  std::map<int, double> price_multiplier;      // per offloaded request
  std::map<int, std::vector<double>> slack_budget_s;  // slave budgets per request
  std::vector<double> free_capacity_hz;        // after the final placement
  std::vector<std::pair<int, double>> ranking; // final spill-phase ranking
  std::vector<int> reverted_requests;
  std::vector<int> infeasible_requests;        // no feasible local or offloaded execution
};

struct SolutionReport {
  double objective = 0;
  CostBreakdown costs;
  bool feasible = true;
  FeasibilityReport validation;
  std::vector<int> infeasible_requests;
  std::vector<double> objective_trace;  // objective after each accepted step
};

struct JcoraResult {
  Assignment assignment;
  SolutionReport report;
  SolverTrace trace;
};

// Full solver: deadline-tight local allocation, local/offload split, greedy
// placement plus slave clock optimization for the offloaded set, then
// migrate the best positive cost-improvement request and re-optimize until
// no migration helps. The objective trace is non-increasing: a migration
// whose re-optimized objective regresses is rolled back.
JcoraResult solve_jcora(const Scenario& scenario);

// Mechanical feasibility check of an assignment against every model
// constraint; reports per-constraint worst violations.
FeasibilityReport validate(const Scenario& scenario, const Assignment& assignment,
                           double delay_tol_s = 1e-9, double capacity_tol_hz = 1e-9);

}  // namespace mecsfc
