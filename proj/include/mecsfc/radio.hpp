#pragma once

#include "mecsfc/scenario.hpp"

namespace mecsfc {

struct UplinkQuote {
  double sir = 0;
  double rate_bps = 0;
  double delay_s = 0;   // time to push this request's data through the uplink
  double energy_j = 0;  // transmit energy for that time
};

// Uplink SIR of a user against the co-channel users (same in-cell index) of
// all other cells, using pure path-loss gains. Throws std::runtime_error
// when no interferer exists and the scenario sets no SIR cap.
double compute_sir(const Scenario& scenario, const MobileUser& mu);

// Achievable uplink rate: W * log2(1 + SIR).
double uplink_rate_bps(const Scenario& scenario, const MobileUser& mu);

UplinkQuote uplink_quote(const Scenario& scenario, const MobileUser& mu,
                         const ServiceRequest& request);

}  // namespace mecsfc
