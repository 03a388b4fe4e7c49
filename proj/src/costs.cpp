#include "mecsfc/costs.hpp"

#include <cmath>
#include <stdexcept>

#include "mecsfc/radio.hpp"

namespace mecsfc {

namespace {
constexpr double kRefClockHz = 1e9;
}

LocalExecQuote local_exec(const MobileUser& mu, const ServiceRequest& request,
                          std::span<const double> clocks_hz) {
  if (clocks_hz.size() != request.chain.size()) {
    throw std::invalid_argument("local_exec: one clock per chain stage expected");
  }
  LocalExecQuote q;
  for (int l = 0; l < static_cast<int>(request.chain.size()); ++l) {
    const double f = clocks_hz[static_cast<std::size_t>(l)];
    const double data = request.data_fraction * request.chain[static_cast<std::size_t>(l)].data_ratio * mu.input_bits;
    if (data == 0) continue;
    if (f <= 0) throw std::domain_error("local_exec: clock must be positive");
    q.delay_s += data * request.chain[static_cast<std::size_t>(l)].cycles_per_bit / f;
    q.energy_j += data * mu.kappa * f * f;
  }
  return q;
}

std::vector<double> backhaul_delays(const BackhaulGraph& graph, int entry_server,
                                    std::span<const int> placement) {
  std::vector<double> delays;
  int prev = entry_server;
  for (int host : placement) {
    if (host == prev) {
      delays.push_back(0.0);
    } else if (graph.connected(prev, host)) {
      delays.push_back(graph.setup_delay(prev, host));
    } else {
      throw std::runtime_error("backhaul_delays: consecutive hosts " + std::to_string(prev) +
                               " -> " + std::to_string(host) + " are not connected");
    }
    prev = host;
  }
  return delays;
}

double server_compute_delay(const MobileUser& mu, const ServiceRequest& request,
                            int stage, double clock_hz) {
  const double cycles = request.stage_cycles(stage, mu.input_bits);
  if (cycles == 0) return 0.0;
  if (clock_hz <= 0) throw std::domain_error("server_compute_delay: clock must be positive");
  return cycles / clock_hz;
}

double compute_price_usd_per_s(double clock_hz, double eta, double vartheta) {
  if (clock_hz < 0) throw std::domain_error("compute_price: negative clock");
  const double ghz = clock_hz / kRefClockHz;
  return std::exp(-eta) * std::expm1(ghz) * vartheta * kRefClockHz;
}

double compute_cost_usd(double clock_hz, double cycles, double eta, double vartheta) {
  if (clock_hz < 0) throw std::domain_error("compute_cost: negative clock");
  if (cycles <= 0) return 0.0;
  const double ghz = clock_hz / kRefClockHz;
  // P(f) * cycles / f, continuous at f = 0.
  const double shape = ghz > 0 ? std::expm1(ghz) / ghz : 1.0;
  return std::exp(-eta) * vartheta * cycles * shape;
}

OffloadQuote offload_quote(const Scenario& scenario, const MobileUser& mu,
                           const ServiceRequest& request, std::span<const int> placement,
                           std::span<const double> remote_clocks_hz) {
  if (placement.size() != request.chain.size() ||
      remote_clocks_hz.size() != request.chain.size()) {
    throw std::invalid_argument("offload_quote: placement/clock size mismatch");
  }
  OffloadQuote q;
  const auto uplink = uplink_quote(scenario, mu, request);
  q.uplink_delay_s = uplink.delay_s;
  q.tx_energy_j = uplink.energy_j;
  q.backhaul_delay_s = backhaul_delays(scenario.graph, mu.cell, placement);
  q.total_delay_s = q.uplink_delay_s;
  for (int l = 0; l < static_cast<int>(request.chain.size()); ++l) {
    const double d = server_compute_delay(mu, request, l, remote_clocks_hz[static_cast<std::size_t>(l)]);
    q.compute_delay_s.push_back(d);
    q.total_delay_s += q.backhaul_delay_s[static_cast<std::size_t>(l)] + d;
    q.compute_cost_usd += compute_cost_usd(remote_clocks_hz[static_cast<std::size_t>(l)],
                                           request.stage_cycles(l, mu.input_bits),
                                           scenario.price_eta, scenario.price_vartheta);
  }
  return q;
}

CostBreakdown normalized_cost(const Scenario& scenario, const Assignment& assignment) {
  if (assignment.requests.size() != static_cast<std::size_t>(scenario.request_count())) {
    throw std::invalid_argument("normalized_cost: assignment does not cover every request");
  }
  CostBreakdown out;
  int flat = 0;
  for (int m = 0; m < static_cast<int>(scenario.mus.size()); ++m) {
    const auto& mu = scenario.mus[static_cast<std::size_t>(m)];
    MuCost cost;
    cost.mu_index = m;
    for (const auto& req : mu.requests) {
      const auto& ra = assignment.requests[static_cast<std::size_t>(flat++)];
      double term = 0;
      if (!ra.offloaded) {
        const auto local = local_exec(mu, req, ra.local_clock_hz);
        term = local.energy_j / mu.energy_budget_j;
        cost.local_part += term;
      } else {
        const auto quote = offload_quote(scenario, mu, req, ra.placement, ra.remote_clock_hz);
        term = scenario.theta_tx * quote.tx_energy_j / mu.energy_budget_j +
               scenario.theta_cp * quote.compute_cost_usd / mu.compute_budget_usd;
        cost.offload_part += term;
      }
      cost.per_request.push_back(term);
      cost.total += term;
    }
    out.objective += cost.total;
    out.per_mu.push_back(std::move(cost));
  }
  return out;
}

double delta_z(const Scenario& scenario, const MobileUser& mu, const LocalExecQuote& local,
               double tx_energy_j, double compute_cost_usd) {
  return local.energy_j / mu.energy_budget_j -
         (scenario.theta_tx * tx_energy_j / mu.energy_budget_j +
          scenario.theta_cp * compute_cost_usd / mu.compute_budget_usd);
}

}  // namespace mecsfc
