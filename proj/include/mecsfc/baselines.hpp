#pragma once

#include "mecsfc/jcora.hpp"

namespace mecsfc {

struct BaselineResult {
  Assignment assignment;
  SolutionReport report;
};

// Greedy offloading with joint resource allocation: requests move to their
// own base-station server in descending data-size order until its capacity
// is filled; everything else runs locally. Clock allocation then follows the
// same slave optimization, restricted to the home servers.
BaselineResult solve_gojra(const Scenario& scenario);

// Per-station heuristic: a request is offloaded to its own base-station
// server only when its cost improvement factor is positive and the server
// has room. Users whose clock capacity cannot carry all of their requests
// push the overflow to the home server first. No backhaul edge is ever used.
BaselineResult solve_hoda(const Scenario& scenario);

}  // namespace mecsfc
