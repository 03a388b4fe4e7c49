#include "mecsfc/baselines.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "solver_detail.hpp"

namespace mecsfc {

namespace {

// Server load a request will settle at once the slave allocation runs with
// every stage on one host: all stages share one clock, so the footprint is
// chain length times total cycles over the compute-time budget.
double home_load_hz(const detail::RequestCtx& rc) {
  if (rc.total_cycles <= 0) return 0;
  return static_cast<double>(rc.stage_cycles.size()) * rc.total_cycles / rc.slave_budget_s;
}

bool home_supports_chain(const Scenario& scenario, const detail::RequestCtx& rc,
                         const ServiceRequest& req) {
  for (const auto& st : req.chain) {
    if (!scenario.graph.supports(rc.home, st.function_id)) return false;
  }
  return true;
}

BaselineResult finalize(const Scenario& scenario, const detail::ScenarioCtx& ctx,
                        const std::vector<bool>& offloaded,
                        const std::vector<int>& infeasible) {
  std::map<int, std::vector<int>> placement;
  std::vector<int> ids;
  for (const auto& rc : ctx.requests) {
    if (!offloaded[static_cast<std::size_t>(rc.flat)]) continue;
    ids.push_back(rc.flat);
    placement[rc.flat] = std::vector<int>(rc.stage_cycles.size(), rc.home);
  }
  const auto slave = solve_slave(scenario, placement, ids);

  BaselineResult out;
  out.assignment.requests.resize(ctx.requests.size());
  for (const auto& rc : ctx.requests) {
    auto& ra = out.assignment.requests[static_cast<std::size_t>(rc.flat)];
    if (offloaded[static_cast<std::size_t>(rc.flat)]) {
      ra.offloaded = true;
      ra.placement = placement.at(rc.flat);
      ra.remote_clock_hz = slave.remote_clock_hz.at(rc.flat);
    } else {
      ra.local_clock_hz = rc.local_clocks;
    }
  }
  out.report.costs = normalized_cost(scenario, out.assignment);
  out.report.objective = out.report.costs.objective;
  out.report.validation = validate(scenario, out.assignment);
  out.report.feasible = out.report.validation.feasible;
  out.report.infeasible_requests = infeasible;
  out.report.objective_trace = {out.report.objective};
  return out;
}

}  // namespace

BaselineResult solve_gojra(const Scenario& scenario) {
  const auto ctx = detail::build_context(scenario);
  const int n = static_cast<int>(ctx.requests.size());
  std::vector<bool> offloaded(static_cast<std::size_t>(n), false);

  std::vector<double> reserve(scenario.graph.nodes.size());
  for (std::size_t m = 0; m < reserve.size(); ++m) {
    reserve[m] = scenario.graph.nodes[m].capacity_hz * (1.0 - 1e-6);
  }

  // Largest data first, per cell, while the home server has room.
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ra = ctx.requests[static_cast<std::size_t>(a)];
    const auto& rb = ctx.requests[static_cast<std::size_t>(b)];
    const double da = scenario.request(a).data_fraction * scenario.mus[static_cast<std::size_t>(ra.mu_idx)].input_bits;
    const double db = scenario.request(b).data_fraction * scenario.mus[static_cast<std::size_t>(rb.mu_idx)].input_bits;
    if (da != db) return da > db;
    return a < b;
  });

  for (int flat : order) {
    const auto& rc = ctx.requests[static_cast<std::size_t>(flat)];
    if (!rc.offloadable || rc.total_cycles <= 0) continue;
    if (!home_supports_chain(scenario, rc, scenario.request(flat))) continue;
    const double load = home_load_hz(rc);
    if (load <= reserve[static_cast<std::size_t>(rc.home)]) {
      offloaded[static_cast<std::size_t>(flat)] = true;
      reserve[static_cast<std::size_t>(rc.home)] -= load;
    }
  }

  // Users whose local remainder overruns their clock capacity get one repair
  // pass before being reported infeasible.
  std::vector<int> infeasible;
  for (const auto& mu : scenario.mus) {
    double local_load = 0;
    for (const auto& req : mu.requests) {
      if (!offloaded[static_cast<std::size_t>(req.id)]) {
        local_load += ctx.requests[static_cast<std::size_t>(req.id)].local_clock_sum;
      }
    }
    if (local_load <= mu.max_clock_hz * (1.0 + 1e-12)) continue;
    std::vector<int> local_ids;
    for (const auto& req : mu.requests) {
      if (!offloaded[static_cast<std::size_t>(req.id)]) local_ids.push_back(req.id);
    }
    std::sort(local_ids.begin(), local_ids.end(), [&](int a, int b) {
      return ctx.requests[static_cast<std::size_t>(a)].local_clock_sum >
             ctx.requests[static_cast<std::size_t>(b)].local_clock_sum;
    });
    for (int flat : local_ids) {
      if (local_load <= mu.max_clock_hz * (1.0 + 1e-12)) break;
      const auto& rc = ctx.requests[static_cast<std::size_t>(flat)];
      if (!rc.offloadable || !home_supports_chain(scenario, rc, scenario.request(flat))) continue;
      const double load = home_load_hz(rc);
      if (load <= reserve[static_cast<std::size_t>(rc.home)]) {
        offloaded[static_cast<std::size_t>(flat)] = true;
        reserve[static_cast<std::size_t>(rc.home)] -= load;
        local_load -= rc.local_clock_sum;
      }
    }
    if (local_load > mu.max_clock_hz * (1.0 + 1e-12)) {
      for (const auto& req : mu.requests) {
        if (!offloaded[static_cast<std::size_t>(req.id)]) infeasible.push_back(req.id);
      }
    }
  }

  return finalize(scenario, ctx, offloaded, infeasible);
}

BaselineResult solve_hoda(const Scenario& scenario) {
  const auto ctx = detail::build_context(scenario);
  const int n = static_cast<int>(ctx.requests.size());
  std::vector<bool> offloaded(static_cast<std::size_t>(n), false);

  std::vector<double> reserve(scenario.graph.nodes.size());
  for (std::size_t m = 0; m < reserve.size(); ++m) {
    reserve[m] = scenario.graph.nodes[m].capacity_hz * (1.0 - 1e-6);
  }

  // Forced overflow first: the requests the per-user clock capacity cannot
  // keep on-device take home-server room ahead of any voluntary offload.
  std::vector<int> infeasible;
  std::vector<int> forced;
  for (const auto& mu : scenario.mus) {
    if (mu.requests.empty()) continue;
    std::vector<std::vector<double>> clocks;
    for (const auto& req : mu.requests) {
      clocks.push_back(ctx.requests[static_cast<std::size_t>(req.id)].local_clocks);
    }
    const auto flags = split_local_offload(mu, clocks);
    for (std::size_t r = 0; r < flags.size(); ++r) {
      if (flags[r]) forced.push_back(mu.requests[r].id);
    }
  }
  for (int flat : forced) {
    const auto& rc = ctx.requests[static_cast<std::size_t>(flat)];
    if (rc.offloadable && home_supports_chain(scenario, rc, scenario.request(flat)) &&
        home_load_hz(rc) <= reserve[static_cast<std::size_t>(rc.home)]) {
      offloaded[static_cast<std::size_t>(flat)] = true;
      reserve[static_cast<std::size_t>(rc.home)] -= home_load_hz(rc);
    } else {
      infeasible.push_back(flat);
    }
  }

  // Voluntary offloads: positive cost improvement, best first.
  std::vector<std::pair<double, int>> candidates;
  for (const auto& rc : ctx.requests) {
    if (offloaded[static_cast<std::size_t>(rc.flat)] || !rc.offloadable) continue;
    if (rc.dz > 0) candidates.push_back({rc.dz, rc.flat});
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto& [dz, flat] : candidates) {
    const auto& rc = ctx.requests[static_cast<std::size_t>(flat)];
    if (!home_supports_chain(scenario, rc, scenario.request(flat))) continue;
    const double load = home_load_hz(rc);
    if (load <= reserve[static_cast<std::size_t>(rc.home)]) {
      offloaded[static_cast<std::size_t>(flat)] = true;
      reserve[static_cast<std::size_t>(rc.home)] -= load;
    }
  }

  return finalize(scenario, ctx, offloaded, infeasible);
}

}  // namespace mecsfc
