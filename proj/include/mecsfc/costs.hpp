#pragma once

#include <span>
#include <vector>

#include "mecsfc/assignment.hpp"
#include "mecsfc/scenario.hpp"

namespace mecsfc {

struct LocalExecQuote {
  double delay_s = 0;
  double energy_j = 0;
};

// Local execution delay and energy of one request with the given per-stage
// clocks. Delay sums data * cycles_per_bit / f over the chain; energy sums
// data * kappa * f^2 (the energy term carries no cycles-per-bit factor).
LocalExecQuote local_exec(const MobileUser& mu, const ServiceRequest& request,
                          std::span<const double> clocks_hz);

// Per-transition backhaul delays for an offloaded request. The chain enters
// at the home base-station server, so transition l is the hop into stage l's
// host: entry->host(0), host(0)->host(1), ... Co-located hops cost zero;
// a hop between distinct unconnected servers is a routing violation and
// throws std::runtime_error.
std::vector<double> backhaul_delays(const BackhaulGraph& graph, int entry_server,
                                    std::span<const int> placement);

// Server-side processing time of one stage at the given clock.
double server_compute_delay(const MobileUser& mu, const ServiceRequest& request,
                            int stage, double clock_hz);

// Computing price per second at clock f. The exponential takes the clock in
// GHz (f / 1e9) and the per-cycle price vartheta is scaled back by the same
// reference, keeping the result finite at server clock rates:
//   P(f) = exp(-eta) * (exp(f/1e9) - 1) * vartheta * 1e9   [$ / s]
double compute_price_usd_per_s(double clock_hz, double eta, double vartheta);

// Cost of processing `cycles` at clock f: P(f) * cycles / f. Continuous at
// f = 0 where it tends to exp(-eta) * vartheta * cycles.
double compute_cost_usd(double clock_hz, double cycles, double eta, double vartheta);

struct OffloadQuote {
  double uplink_delay_s = 0;
  std::vector<double> backhaul_delay_s;  // per transition
  std::vector<double> compute_delay_s;   // per stage
  double total_delay_s = 0;
  double tx_energy_j = 0;
  double compute_cost_usd = 0;
};

OffloadQuote offload_quote(const Scenario& scenario, const MobileUser& mu,
                           const ServiceRequest& request, std::span<const int> placement,
                           std::span<const double> remote_clocks_hz);

struct MuCost {
  int mu_index = 0;
  double total = 0;
  double local_part = 0;
  double offload_part = 0;
  std::vector<double> per_request;  // aligned with the user's request list
};

struct CostBreakdown {
  double objective = 0;  // sum of the per-user normalized costs
  std::vector<MuCost> per_mu;
};

// Normalized cost of a complete assignment:
//   Z = sum_r [ (1-x) e_loc/E + x (theta_tx e_tx/E + theta_cp C/C_budget) ]
// Throws std::invalid_argument when the assignment is incomplete.
CostBreakdown normalized_cost(const Scenario& scenario, const Assignment& assignment);

// Cost improvement factor of offloading one request: positive when the
// offloaded terms undercut its local energy term.
double delta_z(const Scenario& scenario, const MobileUser& mu, const LocalExecQuote& local,
               double tx_energy_j, double compute_cost_usd);

}  // namespace mecsfc
