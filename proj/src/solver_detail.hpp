#pragma once

// Internal solver plumbing shared by the main solver and the baselines.

#include <limits>
#include <set>
#include <vector>

#include "mecsfc/costs.hpp"
#include "mecsfc/jcora.hpp"
#include "mecsfc/radio.hpp"
#include "mecsfc/scenario.hpp"

namespace mecsfc::detail {

struct RequestCtx {
  int flat = -1;
  int mu_idx = -1;
  int req_idx = -1;
  int home = -1;
  std::vector<double> stage_cycles;
  double total_cycles = 0;
  std::vector<double> local_clocks;
  double local_clock_sum = 0;
  LocalExecQuote local_quote;
  double lambda = 0;
  bool uplink_ok = false;
  UplinkQuote uplink;
  double hop_budget_s = 0;
  double master_slack_s = 0;  // deadline minus request uplink time and hops
  double slave_budget_s = 0;  // deadline minus application uplink time and hops
  bool offloadable = false;
  RemoteEstimate estimate;
  double est_cost_usd = 0;
  double dz = -std::numeric_limits<double>::infinity();
};

struct ScenarioCtx {
  const Scenario* scenario = nullptr;
  double hop_delay_s = 0;
  std::vector<RequestCtx> requests;  // flat order
};

ScenarioCtx build_context(const Scenario& scenario);

struct Step1State {
  std::vector<bool> offloaded;
  std::set<int> blacklist;
  Assignment assignment;
  double objective = std::numeric_limits<double>::infinity();
  PlacementResult placement;
  SlaveResult slave;
  std::vector<int> infeasible;
};

// Places and allocates clocks for the currently offloaded set, reverting
// requests the placement or the per-server capacity cannot carry.
Step1State run_step1(const ScenarioCtx& ctx, std::vector<bool> offloaded,
                     std::set<int> blacklist);

}  // namespace mecsfc::detail
