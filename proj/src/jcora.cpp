#include "mecsfc/jcora.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "mecsfc/numerics.hpp"
#include "solver_detail.hpp"

namespace mecsfc {

namespace {
constexpr double kRefClockHz = 1e9;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::vector<double> local_allocation(const MobileUser& mu, const ServiceRequest& request) {
  if (request.chain.empty()) throw std::invalid_argument("local_allocation: empty chain");
  if (mu.deadline_s <= 0) throw std::invalid_argument("local_allocation: nonpositive deadline");

  const double data = request.data_fraction * mu.input_bits;
  double weighted = 0;  // sum_j xi_j * c_j^(2/3)
  for (const auto& st : request.chain) {
    weighted += st.data_ratio * std::cbrt(st.cycles_per_bit * st.cycles_per_bit);
  }
  std::vector<double> clocks;
  clocks.reserve(request.chain.size());
  const double scale = data * weighted / mu.deadline_s;
  for (const auto& st : request.chain) {
    clocks.push_back(std::cbrt(st.cycles_per_bit) * scale);
  }
  return clocks;
}

double local_allocation_multiplier(const MobileUser& mu, const ServiceRequest& request,
                                   std::span<const double> clocks_hz) {
  if (clocks_hz.empty()) return 0;
  const double f = clocks_hz[0];
  const double c = request.chain.front().cycles_per_bit;
  return 2.0 * mu.kappa * f * f * f / (mu.energy_budget_j * c);
}

std::vector<bool> split_local_offload(const MobileUser& mu,
                                      const std::vector<std::vector<double>>& local_clocks_hz) {
  if (local_clocks_hz.size() != mu.requests.size()) {
    throw std::invalid_argument("split_local_offload: one clock vector per request expected");
  }
  std::vector<num::KnapsackItem> items;
  for (int r = 0; r < static_cast<int>(mu.requests.size()); ++r) {
    double total = 0;
    for (double f : local_clocks_hz[static_cast<std::size_t>(r)]) total += f;
    items.push_back({r, 1.0, total});
  }
  const auto local = num::solve_knapsack(items, mu.max_clock_hz);
  std::vector<bool> offload(mu.requests.size(), true);
  for (int r : local) offload[static_cast<std::size_t>(r)] = false;
  return offload;
}

RemoteEstimate estimate_remote_alloc(const Scenario& scenario, const MobileUser& mu,
                                     const ServiceRequest& request, const UplinkQuote& uplink,
                                     double hop_budget_s) {
  const double slack = mu.deadline_s - uplink.delay_s - hop_budget_s;
  if (slack <= 0) {
    throw std::runtime_error("request infeasible for offloading: no positive delay slack");
  }
  RemoteEstimate est;
  est.slack_s = slack;

  double total_cycles = 0;
  for (int l = 0; l < static_cast<int>(request.chain.size()); ++l) {
    total_cycles += request.stage_cycles(l, mu.input_bits);
  }
  if (total_cycles == 0) {
    est.clock_hz.assign(request.chain.size(), 0.0);
    est.price_multiplier = 0;
    return est;
  }

  const double coef = mu.compute_budget_usd * std::exp(-scenario.price_eta) * scenario.price_vartheta;
  const auto clock_ghz = [&](double multiplier) {
    return num::lambert_w0((coef * multiplier - 1.0) / std::exp(1.0)) + 1.0;
  };
  const auto budget_gap = [&](double multiplier) {
    const double g = clock_ghz(multiplier);
    if (g <= 0) return kInf;
    return total_cycles / (g * kRefClockHz) - slack;
  };

  double f_hz;
  double multiplier;
  if (request.chain.size() == 1) {
    // One stage pins the clock by the delay equality directly.
    f_hz = total_cycles / slack;
    const double g = f_hz / kRefClockHz;
    multiplier = ((g - 1.0) * std::exp(g) + 1.0) / coef;
  } else {
    double lo = 1e-6 / coef;
    double hi = 1.0 / coef;
    int guard = 0;
    while (budget_gap(hi) > 0 && guard++ < 400) hi *= 4.0;
    guard = 0;
    while (budget_gap(lo) < 0 && guard++ < 400) lo /= 4.0;
    multiplier = num::find_root(budget_gap, lo, hi, 1e-13);
    f_hz = clock_ghz(multiplier) * kRefClockHz;
  }

  const double residual = std::abs(total_cycles / f_hz - slack);
  if (!(residual <= 1e-9)) {
    throw std::logic_error("estimate_remote_alloc: delay budget residual too large");
  }
  est.clock_hz.assign(request.chain.size(), f_hz);
  est.price_multiplier = multiplier;
  return est;
}

namespace {

// Stage handles: one knapsack item id per (request, stage).
int stage_key(int flat_id, int stage) { return flat_id * 16 + stage; }
int key_flat(int key) { return key / 16; }
int key_stage(int key) { return key % 16; }

}  // namespace

PlacementResult place_functions_gtda(const Scenario& scenario,
                                     const std::vector<int>& offloaded_ids,
                                     const std::map<int, RemoteEstimate>& estimates) {
  PlacementResult out;
  const int n_servers = static_cast<int>(scenario.graph.nodes.size());
  out.free_capacity_hz.resize(static_cast<std::size_t>(n_servers));
  for (int m = 0; m < n_servers; ++m) {
    out.free_capacity_hz[static_cast<std::size_t>(m)] = scenario.graph.nodes[static_cast<std::size_t>(m)].capacity_hz;
  }

  struct Stage {
    int flat;
    int stage;
    int function_id;
    double size_hz;
    int host = -1;
  };
  std::vector<Stage> stages;
  std::map<int, int> stage_index;  // key -> index into stages
  std::map<int, int> chain_len;
  std::set<int> active(offloaded_ids.begin(), offloaded_ids.end());

  for (int flat : offloaded_ids) {
    const auto it = estimates.find(flat);
    if (it == estimates.end()) throw std::invalid_argument("missing clock estimate for request");
    const auto& req = scenario.request(flat);
    chain_len[flat] = static_cast<int>(req.chain.size());
    for (int l = 0; l < static_cast<int>(req.chain.size()); ++l) {
      Stage st{flat, l, req.chain[static_cast<std::size_t>(l)].function_id,
               it->second.clock_hz[static_cast<std::size_t>(l)], -1};
      stage_index[stage_key(flat, l)] = static_cast<int>(stages.size());
      stages.push_back(st);
    }
  }

  const auto place = [&](int key, int host) {
    auto& st = stages[static_cast<std::size_t>(stage_index.at(key))];
    st.host = host;
    out.free_capacity_hz[static_cast<std::size_t>(host)] -= st.size_hz;
  };

  // Phase one: pack every cell's offloaded stages onto its own edge server.
  for (const auto& cell : scenario.cells) {
    const int m = cell.id;
    std::vector<num::KnapsackItem> items;
    for (const auto& st : stages) {
      if (st.host != -1) continue;
      if (scenario.home_server(st.flat) != m) continue;
      if (!scenario.graph.supports(m, st.function_id)) continue;
      items.push_back({stage_key(st.flat, st.stage), 1.0, st.size_hz});
    }
    for (int key : num::solve_knapsack(items, out.free_capacity_hz[static_cast<std::size_t>(m)])) {
      place(key, m);
    }
  }

  // Phase two: spill the rest onto servers ranked by free capacity per
  // in-neighbor, keeping each stage on a host connected to its neighbors in
  // the chain. Requests that stay incomplete are reverted and their capacity
  // returned, which may unlock another spill round.
  const auto host_ok = [&](const Stage& st, int m) {
    if (!scenario.graph.supports(m, st.function_id)) return false;
    const int prev = st.stage == 0
                         ? scenario.home_server(st.flat)
                         : stages[static_cast<std::size_t>(stage_index.at(stage_key(st.flat, st.stage - 1)))].host;
    if (prev == -1) return false;
    if (prev != m && !scenario.graph.connected(prev, m)) return false;
    if (st.stage + 1 < chain_len.at(st.flat)) {
      const int next = stages[static_cast<std::size_t>(stage_index.at(stage_key(st.flat, st.stage + 1)))].host;
      if (next != -1 && next != m && !scenario.graph.connected(m, next)) return false;
    }
    return true;
  };

  bool counted_unplaced = false;
  while (true) {
    bool spill_progress = true;
    while (spill_progress) {
      spill_progress = false;
      std::vector<std::pair<int, double>> ranking;
      for (int m = 0; m < n_servers; ++m) {
        const int degree = std::max<std::size_t>(1, scenario.graph.in_neighbors(m).size());
        ranking.push_back({m, out.free_capacity_hz[static_cast<std::size_t>(m)] / static_cast<double>(degree)});
      }
      std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      out.ranking = ranking;

      for (const auto& [m, metric] : ranking) {
        std::vector<num::KnapsackItem> items;
        for (const auto& st : stages) {
          if (st.host != -1 || !active.count(st.flat)) continue;
          if (!host_ok(st, m)) continue;
          items.push_back({stage_key(st.flat, st.stage), 1.0, st.size_hz});
        }
        const auto chosen = num::solve_knapsack(items, out.free_capacity_hz[static_cast<std::size_t>(m)]);
        for (int key : chosen) place(key, m);
        spill_progress = spill_progress || !chosen.empty();
      }
    }

    std::vector<int> incomplete;
    for (int flat : active) {
      for (int l = 0; l < chain_len.at(flat); ++l) {
        if (stages[static_cast<std::size_t>(stage_index.at(stage_key(flat, l)))].host == -1) {
          incomplete.push_back(flat);
          break;
        }
      }
    }
    if (!counted_unplaced) {
      counted_unplaced = true;
      for (int flat : incomplete) {
        for (int l = 0; l < chain_len.at(flat); ++l) {
          if (stages[static_cast<std::size_t>(stage_index.at(stage_key(flat, l)))].host == -1) ++out.unplaced_stage_count;
        }
      }
    }
    if (incomplete.empty()) break;
    for (int flat : incomplete) {
      active.erase(flat);
      out.reverted.push_back(flat);
      for (int l = 0; l < chain_len.at(flat); ++l) {
        auto& st = stages[static_cast<std::size_t>(stage_index.at(stage_key(flat, l)))];
        if (st.host != -1) {
          out.free_capacity_hz[static_cast<std::size_t>(st.host)] += st.size_hz;
          st.host = -1;
        }
      }
    }
  }

  for (int flat : active) {
    std::vector<int> hosts;
    for (int l = 0; l < chain_len.at(flat); ++l) {
      hosts.push_back(stages[static_cast<std::size_t>(stage_index.at(stage_key(flat, l)))].host);
    }
    out.placement[flat] = std::move(hosts);
  }
  std::sort(out.reverted.begin(), out.reverted.end());
  return out;
}

namespace {

struct SlaveStage {
  int flat;
  int stage;
  int host;
  double cycles;    // w_l
  double lb_s;      // minimum compute time at the host's full capacity
};

struct SlaveRequest {
  int flat;
  double budget_s;  // total compute-time budget across the chain
  std::vector<int> stage_indices;
};

}  // namespace

SlaveResult solve_slave(const Scenario& scenario,
                        const std::map<int, std::vector<int>>& placement,
                        const std::vector<int>& offloaded_ids) {
  SlaveResult out;
  const int n_servers = static_cast<int>(scenario.graph.nodes.size());
  out.server_load_hz.assign(static_cast<std::size_t>(n_servers), 0.0);
  if (offloaded_ids.empty()) return out;

  const double hop = scenario.graph.uniform_hop_delay();
  std::vector<SlaveStage> stages;
  std::vector<SlaveRequest> reqs;

  for (int flat : offloaded_ids) {
    const auto it = placement.find(flat);
    if (it == placement.end()) throw std::invalid_argument("solve_slave: request without placement");
    const auto& mu = scenario.request_owner(flat);
    const auto& req = scenario.request(flat);
    const double rate = uplink_rate_bps(scenario, mu);
    const int L = static_cast<int>(req.chain.size());
    SlaveRequest sr;
    sr.flat = flat;
    // Whole-application uplink time is reserved ahead of the chain budget.
    sr.budget_s = mu.deadline_s - mu.input_bits / rate - static_cast<double>(L) * hop;
    if (sr.budget_s <= 0) {
      throw std::runtime_error("solve_slave: request " + std::to_string(flat) +
                               " has no positive delay budget");
    }
    for (int l = 0; l < L; ++l) {
      const int host = it->second.at(static_cast<std::size_t>(l));
      const double cycles = req.stage_cycles(l, mu.input_bits);
      const double cap = scenario.graph.nodes.at(static_cast<std::size_t>(host)).capacity_hz;
      sr.stage_indices.push_back(static_cast<int>(stages.size()));
      stages.push_back({flat, l, host, cycles, cycles > 0 ? cycles / cap : 0.0});
    }
    reqs.push_back(std::move(sr));
  }

  const int n = static_cast<int>(stages.size());
  const double beta = scenario.beta_mu_weight;
  const double kappa0 = beta * std::exp(-scenario.price_eta) * scenario.price_vartheta * kRefClockHz;

  // Proportional split: every stage of a request runs at the same clock.
  // This is the stationary point of the cost when no capacity binds.
  std::vector<double> tau(static_cast<std::size_t>(n), 0.0);
  for (const auto& sr : reqs) {
    double total = 0;
    for (int idx : sr.stage_indices) total += stages[static_cast<std::size_t>(idx)].cycles;
    for (int idx : sr.stage_indices) {
      tau[static_cast<std::size_t>(idx)] =
          total > 0 ? sr.budget_s * stages[static_cast<std::size_t>(idx)].cycles / total
                    : sr.budget_s / static_cast<double>(sr.stage_indices.size());
    }
  }

  const auto loads = [&](const std::vector<double>& t) {
    std::vector<double> load(static_cast<std::size_t>(n_servers), 0.0);
    for (int i = 0; i < n; ++i) {
      if (stages[static_cast<std::size_t>(i)].cycles > 0) {
        load[static_cast<std::size_t>(stages[static_cast<std::size_t>(i)].host)] +=
            stages[static_cast<std::size_t>(i)].cycles / t[static_cast<std::size_t>(i)];
      }
    }
    return load;
  };

  const auto worst_server = [&](const std::vector<double>& load) {
    int worst = -1;
    double ratio = 1.0;
    for (int m = 0; m < n_servers; ++m) {
      const double cap = scenario.graph.nodes[static_cast<std::size_t>(m)].capacity_hz;
      if (load[static_cast<std::size_t>(m)] / cap > ratio) {
        ratio = load[static_cast<std::size_t>(m)] / cap;
        worst = m;
      }
    }
    return std::pair<int, double>(worst, ratio);
  };

  auto load_now = loads(tau);
  bool binding = false;
  for (int m = 0; m < n_servers; ++m) {
    if (load_now[static_cast<std::size_t>(m)] >
        scenario.graph.nodes[static_cast<std::size_t>(m)].capacity_hz * (1.0 - 1e-9)) {
      binding = true;
    }
  }

  if (binding) {
    // Search a strictly feasible start by stretching the compute time of
    // stages on overloaded servers at the expense of their chain peers.
    std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
    bool feasible = false;
    for (int round = 0; round < 400 && !feasible; ++round) {
      auto load = loads(tau);
      feasible = true;
      for (int m = 0; m < n_servers; ++m) {
        const double cap = scenario.graph.nodes[static_cast<std::size_t>(m)].capacity_hz;
        if (load[static_cast<std::size_t>(m)] > cap * (1.0 - 2e-6)) {
          feasible = false;
          for (int i = 0; i < n; ++i) {
            if (stages[static_cast<std::size_t>(i)].host == m) {
              weight[static_cast<std::size_t>(i)] *= load[static_cast<std::size_t>(m)] / (cap * (1.0 - 4e-6));
            }
          }
        }
      }
      if (feasible) break;
      for (const auto& sr : reqs) {
        double total = 0;
        for (int idx : sr.stage_indices) {
          total += stages[static_cast<std::size_t>(idx)].cycles * weight[static_cast<std::size_t>(idx)];
        }
        if (total <= 0) continue;
        for (int idx : sr.stage_indices) {
          tau[static_cast<std::size_t>(idx)] = sr.budget_s *
                                               stages[static_cast<std::size_t>(idx)].cycles *
                                               weight[static_cast<std::size_t>(idx)] / total;
        }
      }
    }
    if (!feasible) {
      const auto [server, ratio] = worst_server(loads(tau));
      throw capacity_error(server, "solve_slave: server " + std::to_string(server) +
                                       " cannot host its assigned load (utilization " +
                                       std::to_string(ratio) + ")");
    }

    // Convex program in the per-stage compute times.
    num::ConvexProgram cp;
    cp.n = n;
    const auto phi_terms = [&, kappa0](std::span<const double> t, int i) {
      const double a = stages[static_cast<std::size_t>(i)].cycles / kRefClockHz;
      const double ti = t[static_cast<std::size_t>(i)];
      return std::pair<double, double>(a, ti);
    };
    cp.value = [&, kappa0](std::span<const double> t) {
      double v = 0;
      for (int i = 0; i < n; ++i) {
        const auto [a, ti] = phi_terms(t, i);
        if (a > 0) v += kappa0 * ti * std::expm1(a / ti);
      }
      return v;
    };
    cp.gradient = [&, kappa0](std::span<const double> t, std::span<double> g) {
      for (int i = 0; i < n; ++i) {
        const auto [a, ti] = phi_terms(t, i);
        const double u = a > 0 ? a / ti : 0.0;
        g[static_cast<std::size_t>(i)] = a > 0 ? kappa0 * (std::exp(u) * (1.0 - u) - 1.0) : 0.0;
      }
    };
    cp.hessian = [&, kappa0](std::span<const double> t, std::span<double> h) {
      std::fill(h.begin(), h.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        const auto [a, ti] = phi_terms(t, i);
        if (a > 0) {
          h[static_cast<std::size_t>(i) * n + i] = kappa0 * std::exp(a / ti) * a * a / (ti * ti * ti);
        }
      }
    };
    for (const auto& sr : reqs) {
      std::vector<double> row(static_cast<std::size_t>(n), 0.0);
      for (int idx : sr.stage_indices) row[static_cast<std::size_t>(idx)] = 1.0;
      cp.eq_coeff.push_back(std::move(row));
      cp.eq_rhs.push_back(sr.budget_s);
    }
    for (int m = 0; m < n_servers; ++m) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i) {
        if (stages[static_cast<std::size_t>(i)].host == m && stages[static_cast<std::size_t>(i)].cycles > 0) {
          members.push_back(i);
        }
      }
      if (members.empty()) continue;
      const double cap = scenario.graph.nodes[static_cast<std::size_t>(m)].capacity_hz;
      num::ConvexProgram::Constraint con;
      con.value = [&, members, cap](std::span<const double> t) {
        double load = -cap;
        for (int i : members) load += stages[static_cast<std::size_t>(i)].cycles / t[static_cast<std::size_t>(i)];
        return load;
      };
      con.gradient = [&, members](std::span<const double> t, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        for (int i : members) {
          const double ti = t[static_cast<std::size_t>(i)];
          g[static_cast<std::size_t>(i)] = -stages[static_cast<std::size_t>(i)].cycles / (ti * ti);
        }
      };
      con.hessian = [&, members](std::span<const double> t, std::span<double> h) {
        std::fill(h.begin(), h.end(), 0.0);
        for (int i : members) {
          const double ti = t[static_cast<std::size_t>(i)];
          h[static_cast<std::size_t>(i) * n + i] = 2.0 * stages[static_cast<std::size_t>(i)].cycles / (ti * ti * ti);
        }
      };
      cp.constraints.push_back(std::move(con));
    }
    cp.lower_bounds.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) cp.lower_bounds[static_cast<std::size_t>(i)] = stages[static_cast<std::size_t>(i)].lb_s;

    const auto result = num::minimize_convex(cp, tau, 1e-9);
    tau = result.x;
    out.kkt_residual = result.kkt_residual;
    out.used_barrier = true;
  } else {
    // Stationarity of the proportional point, reported as a KKT residual:
    // per-request marginal costs are already equalized; capacity slack holds.
    double res = 0;
    for (const auto& sr : reqs) {
      double total = 0;
      for (int idx : sr.stage_indices) total += tau[static_cast<std::size_t>(idx)];
      res = std::max(res, std::abs(total - sr.budget_s));
      double nu = kInf;
      for (int idx : sr.stage_indices) {
        const double a = stages[static_cast<std::size_t>(idx)].cycles / kRefClockHz;
        if (a <= 0) continue;
        const double u = a / tau[static_cast<std::size_t>(idx)];
        const double grad = kappa0 * (std::exp(u) * (1.0 - u) - 1.0);
        if (nu == kInf) {
          nu = -grad;
        } else {
          res = std::max(res, std::abs(grad + nu));
        }
      }
    }
    out.kkt_residual = res;
  }

  load_now = loads(tau);
  for (int m = 0; m < n_servers; ++m) out.server_load_hz[static_cast<std::size_t>(m)] = load_now[static_cast<std::size_t>(m)];

  double objective = 0;
  for (const auto& sr : reqs) {
    std::vector<double> clocks;
    std::vector<double> budgets;
    for (int idx : sr.stage_indices) {
      const auto& st = stages[static_cast<std::size_t>(idx)];
      const double t = tau[static_cast<std::size_t>(idx)];
      clocks.push_back(st.cycles > 0 ? st.cycles / t : 0.0);
      budgets.push_back(hop + t);
      if (st.cycles > 0) objective += kappa0 * t * std::expm1(st.cycles / kRefClockHz / t);
    }
    out.remote_clock_hz[sr.flat] = std::move(clocks);
    out.time_budget_s[sr.flat] = std::move(budgets);
  }
  out.objective_usd = objective;
  return out;
}

namespace detail {

ScenarioCtx build_context(const Scenario& scenario) {
  ScenarioCtx ctx;
  ctx.scenario = &scenario;
  ctx.hop_delay_s = scenario.graph.uniform_hop_delay();

  int flat = 0;
  for (int m = 0; m < static_cast<int>(scenario.mus.size()); ++m) {
    const auto& mu = scenario.mus[static_cast<std::size_t>(m)];
    bool mu_uplink_ok = true;
    double rate = 0;
    try {
      rate = uplink_rate_bps(scenario, mu);
    } catch (const std::runtime_error&) {
      mu_uplink_ok = false;
    }
    for (int r = 0; r < static_cast<int>(mu.requests.size()); ++r) {
      const auto& req = mu.requests[static_cast<std::size_t>(r)];
      RequestCtx rc;
      rc.flat = flat++;
      rc.mu_idx = m;
      rc.req_idx = r;
      rc.home = mu.cell;
      for (int l = 0; l < static_cast<int>(req.chain.size()); ++l) {
        rc.stage_cycles.push_back(req.stage_cycles(l, mu.input_bits));
        rc.total_cycles += rc.stage_cycles.back();
      }
      rc.local_clocks = local_allocation(mu, req);
      for (double f : rc.local_clocks) rc.local_clock_sum += f;
      rc.local_quote = rc.total_cycles > 0 ? local_exec(mu, req, rc.local_clocks) : LocalExecQuote{};
      rc.lambda = local_allocation_multiplier(mu, req, rc.local_clocks);
      rc.uplink_ok = mu_uplink_ok;
      if (mu_uplink_ok) {
        const double bits = req.data_fraction * mu.input_bits;
        rc.uplink.rate_bps = rate;
        rc.uplink.delay_s = bits > 0 ? bits / rate : 0.0;
        rc.uplink.energy_j = mu.tx_power_w * rc.uplink.delay_s;
        rc.hop_budget_s = static_cast<double>(req.chain.size()) * ctx.hop_delay_s;
        rc.master_slack_s = mu.deadline_s - rc.uplink.delay_s - rc.hop_budget_s;
        rc.slave_budget_s = mu.deadline_s - mu.input_bits / rate - rc.hop_budget_s;
        rc.offloadable = rc.master_slack_s > 0 && rc.slave_budget_s > 0;
      }
      if (rc.offloadable) {
        try {
          rc.estimate = estimate_remote_alloc(scenario, mu, req, rc.uplink, rc.hop_budget_s);
          for (int l = 0; l < static_cast<int>(req.chain.size()); ++l) {
            rc.est_cost_usd += compute_cost_usd(rc.estimate.clock_hz[static_cast<std::size_t>(l)],
                                                rc.stage_cycles[static_cast<std::size_t>(l)],
                                                scenario.price_eta, scenario.price_vartheta);
          }
          rc.dz = delta_z(scenario, mu, rc.local_quote, rc.uplink.energy_j, rc.est_cost_usd);
        } catch (const std::runtime_error&) {
          rc.offloadable = false;
        }
      }
      ctx.requests.push_back(std::move(rc));
    }
  }
  return ctx;
}

Step1State run_step1(const ScenarioCtx& ctx, std::vector<bool> offloaded,
                     std::set<int> blacklist) {
  const Scenario& scenario = *ctx.scenario;
  Step1State st;

  for (std::size_t i = 0; i < offloaded.size(); ++i) {
    if (offloaded[i] && !ctx.requests[i].offloadable) {
      offloaded[i] = false;
      blacklist.insert(static_cast<int>(i));
    }
  }

  while (true) {
    std::vector<int> ids;
    std::map<int, RemoteEstimate> estimates;
    for (std::size_t i = 0; i < offloaded.size(); ++i) {
      if (offloaded[i]) {
        ids.push_back(static_cast<int>(i));
        estimates[static_cast<int>(i)] = ctx.requests[i].estimate;
      }
    }
    st.placement = place_functions_gtda(scenario, ids, estimates);
    for (int flat : st.placement.reverted) {
      offloaded[static_cast<std::size_t>(flat)] = false;
      blacklist.insert(flat);
    }
    std::vector<int> placed_ids;
    for (const auto& [flat, hosts] : st.placement.placement) placed_ids.push_back(flat);
    try {
      st.slave = solve_slave(scenario, st.placement.placement, placed_ids);
      break;
    } catch (const capacity_error& err) {
      // Drop the heaviest estimated contributor on the stressed server and
      // replace from scratch.
      int victim = -1;
      double victim_load = 0;
      for (const auto& [flat, hosts] : st.placement.placement) {
        double load = 0;
        for (int l = 0; l < static_cast<int>(hosts.size()); ++l) {
          if (hosts[static_cast<std::size_t>(l)] == err.server) {
            load += ctx.requests[static_cast<std::size_t>(flat)].estimate.clock_hz[static_cast<std::size_t>(l)];
          }
        }
        if (load > victim_load + 1e-12) {
          victim = flat;
          victim_load = load;
        }
      }
      if (victim < 0) throw;
      offloaded[static_cast<std::size_t>(victim)] = false;
      blacklist.insert(victim);
    }
  }

  // Assemble the decision state.
  st.assignment.requests.resize(ctx.requests.size());
  for (std::size_t i = 0; i < ctx.requests.size(); ++i) {
    auto& ra = st.assignment.requests[i];
    if (offloaded[i]) {
      ra.offloaded = true;
      ra.placement = st.placement.placement.at(static_cast<int>(i));
      ra.remote_clock_hz = st.slave.remote_clock_hz.at(static_cast<int>(i));
    } else {
      ra.offloaded = false;
      ra.local_clock_hz = ctx.requests[i].local_clocks;
    }
  }
  st.objective = normalized_cost(scenario, st.assignment).objective;
  st.offloaded = std::move(offloaded);
  st.blacklist = std::move(blacklist);

  // Requests that had to leave their device but could not are infeasible.
  for (std::size_t m = 0; m < scenario.mus.size(); ++m) {
    const auto& mu = scenario.mus[m];
    double local_load = 0;
    std::vector<int> stuck;
    for (const auto& req : mu.requests) {
      const int flat = req.id;
      if (!st.offloaded[static_cast<std::size_t>(flat)]) {
        local_load += ctx.requests[static_cast<std::size_t>(flat)].local_clock_sum;
        if (st.blacklist.count(flat)) stuck.push_back(flat);
      }
    }
    if (local_load > mu.max_clock_hz * (1.0 + 1e-12)) {
      for (int flat : stuck) st.infeasible.push_back(flat);
      if (stuck.empty()) {
        for (const auto& req : mu.requests) {
          if (!st.offloaded[static_cast<std::size_t>(req.id)]) st.infeasible.push_back(req.id);
        }
      }
    }
  }
  std::sort(st.infeasible.begin(), st.infeasible.end());
  return st;
}

}  // namespace detail

JcoraResult solve_jcora(const Scenario& scenario) {
  const auto ctx = detail::build_context(scenario);
  const int n = static_cast<int>(ctx.requests.size());

  // Initialization: keep as many requests on-device as the clock capacity
  // allows; the rest start offloaded.
  std::vector<bool> offloaded(static_cast<std::size_t>(n), false);
  for (const auto& mu : scenario.mus) {
    if (mu.requests.empty()) continue;
    std::vector<std::vector<double>> clocks;
    for (const auto& req : mu.requests) {
      clocks.push_back(ctx.requests[static_cast<std::size_t>(req.id)].local_clocks);
    }
    const auto flags = split_local_offload(mu, clocks);
    for (std::size_t r = 0; r < flags.size(); ++r) {
      offloaded[static_cast<std::size_t>(mu.requests[r].id)] = flags[r];
    }
  }

  auto state = detail::run_step1(ctx, offloaded, {});

  SolverTrace trace;
  trace.initial_objective = state.objective;
  std::vector<double> objective_trace{state.objective};

  // Migration loop: move the best positive cost-improvement request over to
  // the servers, re-optimize, and keep the move only when the re-optimized
  // objective does not regress.
  for (int round = 0; round < n; ++round) {
    std::vector<std::pair<double, int>> candidates;
    for (int i = 0; i < n; ++i) {
      if (state.offloaded[static_cast<std::size_t>(i)] || state.blacklist.count(i)) continue;
      if (!ctx.requests[static_cast<std::size_t>(i)].offloadable) continue;
      if (ctx.requests[static_cast<std::size_t>(i)].dz > 0) {
        candidates.push_back({ctx.requests[static_cast<std::size_t>(i)].dz, i});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });

    bool accepted = false;
    for (const auto& [dz, flat] : candidates) {
      auto trial_flags = state.offloaded;
      trial_flags[static_cast<std::size_t>(flat)] = true;
      auto trial = detail::run_step1(ctx, std::move(trial_flags), state.blacklist);
      if (trial.objective <= state.objective + 1e-12) {
        state = std::move(trial);
        trace.iterations.push_back({flat, dz, state.objective});
        objective_trace.push_back(state.objective);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  JcoraResult out;
  out.assignment = std::move(state.assignment);

  for (const auto& rc : ctx.requests) {
    trace.local_multiplier[rc.flat] = rc.lambda;
    if (state.offloaded[static_cast<std::size_t>(rc.flat)] && rc.offloadable) {
      trace.price_multiplier[rc.flat] = rc.estimate.price_multiplier;
    }
  }
  trace.slack_budget_s = state.slave.time_budget_s;
  trace.free_capacity_hz = state.placement.free_capacity_hz;
  trace.ranking = state.placement.ranking;
  for (int flat : state.blacklist) trace.reverted_requests.push_back(flat);
  trace.infeasible_requests = state.infeasible;
  out.trace = std::move(trace);

  out.report.objective = state.objective;
  out.report.costs = normalized_cost(scenario, out.assignment);
  out.report.validation = validate(scenario, out.assignment);
  out.report.feasible = out.report.validation.feasible;
  out.report.infeasible_requests = state.infeasible;
  out.report.objective_trace = std::move(objective_trace);
  return out;
}

FeasibilityReport validate(const Scenario& scenario, const Assignment& assignment,
                           double delay_tol_s, double capacity_tol_hz) {
  FeasibilityReport report;
  const int n_servers = static_cast<int>(scenario.graph.nodes.size());

  ConstraintCheck completeness{"completeness", true, 0, ""};
  ConstraintCheck local_cap{"local_capacity", true, 0, ""};
  ConstraintCheck deadline{"deadline", true, 0, ""};
  ConstraintCheck placement_one{"placement", true, 0, ""};
  ConstraintCheck server_cap{"server_capacity", true, 0, ""};
  ConstraintCheck adjacency{"chain_adjacency", true, 0, ""};
  ConstraintCheck entry{"entry_link", true, 0, ""};
  ConstraintCheck library{"function_library", true, 0, ""};

  if (assignment.requests.size() != static_cast<std::size_t>(scenario.request_count())) {
    completeness.ok = false;
    completeness.detail = "assignment does not cover every request";
    report.constraints = {completeness};
    report.feasible = false;
    return report;
  }

  std::vector<double> server_load(static_cast<std::size_t>(n_servers), 0.0);

  int flat = 0;
  for (const auto& mu : scenario.mus) {
    double local_load = 0;
    for (const auto& req : mu.requests) {
      const auto& ra = assignment.requests[static_cast<std::size_t>(flat)];
      const int L = static_cast<int>(req.chain.size());
      if (!ra.offloaded) {
        if (static_cast<int>(ra.local_clock_hz.size()) != L) {
          completeness.ok = false;
          completeness.detail = "request " + std::to_string(flat) + " lacks local clocks";
          ++flat;
          continue;
        }
        for (double f : ra.local_clock_hz) local_load += f;
        const auto q = local_exec(mu, req, ra.local_clock_hz);
        const double excess = q.delay_s - mu.deadline_s;
        if (excess > delay_tol_s) {
          deadline.ok = false;
          deadline.worst_violation = std::max(deadline.worst_violation, excess);
          deadline.detail = "request " + std::to_string(flat);
        }
      } else {
        if (static_cast<int>(ra.placement.size()) != L ||
            static_cast<int>(ra.remote_clock_hz.size()) != L) {
          completeness.ok = false;
          completeness.detail = "request " + std::to_string(flat) + " lacks placement or clocks";
          ++flat;
          continue;
        }
        bool hosts_valid = true;
        for (int host : ra.placement) {
          if (host < 0 || host >= n_servers) {
            placement_one.ok = false;
            placement_one.detail = "request " + std::to_string(flat) + " has an unknown host";
            hosts_valid = false;
          }
        }
        if (!hosts_valid) {
          ++flat;
          continue;
        }
        for (int l = 0; l < L; ++l) {
          const int host = ra.placement[static_cast<std::size_t>(l)];
          server_load[static_cast<std::size_t>(host)] += ra.remote_clock_hz[static_cast<std::size_t>(l)];
          if (!scenario.graph.supports(host, req.chain[static_cast<std::size_t>(l)].function_id)) {
            library.ok = false;
            library.worst_violation += 1;
            library.detail = "request " + std::to_string(flat) + " stage " + std::to_string(l);
          }
        }
        const int first = ra.placement.front();
        if (first != mu.cell && !scenario.graph.connected(mu.cell, first)) {
          entry.ok = false;
          entry.worst_violation += 1;
          entry.detail = "request " + std::to_string(flat);
        }
        bool chain_ok = true;
        for (int l = 0; l + 1 < L; ++l) {
          const int a = ra.placement[static_cast<std::size_t>(l)];
          const int b = ra.placement[static_cast<std::size_t>(l + 1)];
          if (a != b && !scenario.graph.connected(a, b)) {
            adjacency.ok = false;
            adjacency.worst_violation += 1;
            adjacency.detail = "request " + std::to_string(flat) + " hop " + std::to_string(l);
            chain_ok = false;
          }
        }
        if (chain_ok && entry.ok) {
          const auto quote = offload_quote(scenario, mu, req, ra.placement, ra.remote_clock_hz);
          const double excess = quote.total_delay_s - mu.deadline_s;
          if (excess > delay_tol_s) {
            deadline.ok = false;
            deadline.worst_violation = std::max(deadline.worst_violation, excess);
            deadline.detail = "request " + std::to_string(flat);
          }
        }
      }
      ++flat;
    }
    const double excess = local_load - mu.max_clock_hz;
    if (excess > capacity_tol_hz) {
      local_cap.ok = false;
      local_cap.worst_violation = std::max(local_cap.worst_violation, excess);
      local_cap.detail = "user " + std::to_string(mu.cell) + "/" + std::to_string(mu.index);
    }
  }

  for (int m = 0; m < n_servers; ++m) {
    const double excess = server_load[static_cast<std::size_t>(m)] -
                          scenario.graph.nodes[static_cast<std::size_t>(m)].capacity_hz;
    if (excess > capacity_tol_hz) {
      server_cap.ok = false;
      server_cap.worst_violation = std::max(server_cap.worst_violation, excess);
      server_cap.detail = "server " + std::to_string(m);
    }
  }

  report.constraints = {completeness, local_cap, deadline, placement_one,
                        server_cap,   adjacency, entry,    library};
  report.feasible = true;
  for (const auto& c : report.constraints) report.feasible = report.feasible && c.ok;
  return report;
}

}  // namespace mecsfc
