#pragma once

#include <string>
#include <vector>

namespace mecsfc {

// Full decision state for one request: either executed locally with
// per-stage clocks, or offloaded with a per-stage server placement and
// per-stage remote clocks.
struct RequestAssignment {
  bool offloaded = false;
  std::vector<double> local_clock_hz;
  std::vector<int> placement;
  std::vector<double> remote_clock_hz;
};

// Indexed by flat request id, in scenario order.
struct Assignment {
  std::vector<RequestAssignment> requests;
};

struct ConstraintCheck {
  std::string name;
  bool ok = true;
  double worst_violation = 0;
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<ConstraintCheck> constraints;

  const ConstraintCheck* find(const std::string& name) const {
    for (const auto& c : constraints) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

}  // namespace mecsfc
