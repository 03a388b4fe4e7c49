#include "mecsfc/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace mecsfc {

double compute_sir(const Scenario& scenario, const MobileUser& mu) {
  const auto& serving = scenario.cells.at(static_cast<std::size_t>(mu.cell));
  const double d_serving = distance(mu.position, serving.position);
  if (d_serving <= 0) throw std::runtime_error("user sits on top of its base station");

  // Path-loss gain beta = 1 / d^gamma; SIR = beta_s^2 / sum_q beta_q^2 over
  // the co-channel user of every other cell. The ratio form below is
  // scale-free in the distances.
  const double two_gamma = 2.0 * scenario.pathloss_exponent;
  double interference = 0;
  int interferers = 0;
  for (const auto& cell : scenario.cells) {
    if (cell.id == mu.cell) continue;
    for (int peer_id : cell.mu_ids) {
      const auto& peer = scenario.mus.at(static_cast<std::size_t>(peer_id));
      if (peer.index != mu.index) continue;
      const double d_peer = distance(peer.position, serving.position);
      if (d_peer <= 0) throw std::runtime_error("interferer sits on top of the base station");
      interference += std::pow(d_serving / d_peer, two_gamma);
      ++interferers;
      break;
    }
  }
  if (interferers == 0) {
    if (scenario.sir_cap) return *scenario.sir_cap;
    throw std::runtime_error("no interference term; SIR undefined (configure >= 2 cells or an explicit SIR cap)");
  }
  return 1.0 / interference;
}

double uplink_rate_bps(const Scenario& scenario, const MobileUser& mu) {
  const double sir = compute_sir(scenario, mu);
  const auto& cell = scenario.cells.at(static_cast<std::size_t>(mu.cell));
  return cell.bandwidth_hz * std::log2(1.0 + sir);
}

UplinkQuote uplink_quote(const Scenario& scenario, const MobileUser& mu,
                         const ServiceRequest& request) {
  UplinkQuote q;
  q.sir = compute_sir(scenario, mu);
  const auto& cell = scenario.cells.at(static_cast<std::size_t>(mu.cell));
  q.rate_bps = cell.bandwidth_hz * std::log2(1.0 + q.sir);
  const double bits = request.data_fraction * mu.input_bits;
  q.delay_s = bits > 0 ? bits / q.rate_bps : 0.0;
  q.energy_j = mu.tx_power_w * q.delay_s;
  return q;
}

}  // namespace mecsfc
