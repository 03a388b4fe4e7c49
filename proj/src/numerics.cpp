#include "mecsfc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mecsfc::num {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double lambert_w0(double x) {
  const double branch = -std::exp(-1.0);
  if (std::isnan(x) || x < branch * (1.0 + 1e-12) - 1e-300) {
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (x < branch) x = branch;  // inside rounding slop of the branch point

  // Initial guess, then Halley iterations.
  double w;
  if (x < -0.32) {
    const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    w = -1.0 + p * (1.0 - p / 3.0 + 11.0 / 72.0 * p * p);
  } else if (x < 20.0) {
    w = std::log1p(x) * 0.7;
    if (x > 1.0) w = std::log(x) - std::log(std::log(x) + 1.0) + 1.0;
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  const double tol = 1e-13 * std::max(1.0, std::abs(x));
  for (int it = 0; it < 60; ++it) {
    const double ew = std::exp(w);
    const double r = w * ew - x;
    if (std::abs(r) <= tol) break;
    const double denom = ew * (w + 1.0) - (w + 2.0) * r / (2.0 * w + 2.0);
    double step = r / denom;
    double next = w - step;
    if (next < -1.0) next = -1.0 + 0.5 * (w + 1.0);  // stay on the principal branch
    w = next;
  }
  return w;
}

namespace {

struct KnapsackBest {
  double value = -1.0;
  double size = kInf;
  std::vector<int> ids;

  bool improves(double v, double s, const std::vector<int>& candidate) const {
    if (v > value + 1e-12) return true;
    if (v < value - 1e-12) return false;
    if (s < size - 1e-12) return true;
    if (s > size + 1e-12) return false;
    return candidate < ids;
  }
};

struct KnapsackSearch {
  std::span<const KnapsackItem> items;  // sorted by density desc
  double capacity = 0;
  KnapsackBest best;
  std::vector<int> chosen;
  long nodes = 0;

  double fractional_bound(std::size_t idx, double room, double value) const {
    for (std::size_t i = idx; i < items.size(); ++i) {
      const auto& it = items[i];
      if (it.size <= room) {
        room -= it.size;
        value += it.value;
      } else {
        if (it.size > 0) value += it.value * room / it.size;
        break;
      }
    }
    return value;
  }

  void dfs(std::size_t idx, double used, double value) {
    if (++nodes > 8'000'000L) {
      throw std::runtime_error("solve_knapsack: node budget exceeded");
    }
    if (idx == items.size()) {
      std::vector<int> ids = chosen;
      std::sort(ids.begin(), ids.end());
      if (best.improves(value, used, ids)) {
        best.value = value;
        best.size = used;
        best.ids = std::move(ids);
      }
      return;
    }
    if (fractional_bound(idx, capacity - used, value) < best.value - 1e-12) return;
    const auto& it = items[idx];
    if (used + it.size <= capacity + 1e-12) {
      chosen.push_back(it.id);
      dfs(idx + 1, used + it.size, value + it.value);
      chosen.pop_back();
    }
    dfs(idx + 1, used, value);
  }
};

}  // namespace

std::vector<int> solve_knapsack(std::span<const KnapsackItem> items, double capacity) {
  if (capacity < 0) throw std::invalid_argument("solve_knapsack: negative capacity");
  for (const auto& it : items) {
    if (it.size < 0 || it.value < 0) {
      throw std::invalid_argument("solve_knapsack: negative item size or value");
    }
  }
  if (items.empty()) return {};

  std::vector<KnapsackItem> sorted(items.begin(), items.end());

  // Uniform-value instances (the "pack as many as possible" case) are solved
  // greedily: taking the smallest sizes first is exact and realizes the
  // min-size / lexicographic tie-break directly.
  const bool uniform =
      std::all_of(sorted.begin(), sorted.end(), [&](const KnapsackItem& it) {
        return std::abs(it.value - sorted.front().value) <= 1e-12;
      });
  if (uniform) {
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      if (a.size != b.size) return a.size < b.size;
      return a.id < b.id;
    });
    std::vector<int> ids;
    double used = 0;
    for (const auto& it : sorted) {
      if (it.value == 0) break;  // worthless items are never selected
      if (used + it.size <= capacity + 1e-12) {
        used += it.size;
        ids.push_back(it.id);
      }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    const double da = a.size > 0 ? a.value / a.size : kInf;
    const double db = b.size > 0 ? b.value / b.size : kInf;
    if (da != db) return da > db;
    if (a.size != b.size) return a.size < b.size;
    return a.id < b.id;
  });

  KnapsackSearch search;
  search.items = sorted;
  search.capacity = capacity;
  search.dfs(0, 0.0, 0.0);
  return search.best.ids;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  if (!(lo <= hi)) throw std::invalid_argument("find_root: empty bracket");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw std::invalid_argument("find_root: no sign change in bracket");
  }

  double x = lo;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    x = mid;
    // Secant candidate; accept when it lands safely inside the bracket.
    if (std::isfinite(flo) && std::isfinite(fhi) && fhi != flo) {
      const double sec = hi - fhi * (hi - lo) / (fhi - flo);
      const double margin = 0.01 * (hi - lo);
      if (sec > lo + margin && sec < hi - margin) x = sec;
    }
    const double fx = f(x);
    if (std::abs(fx) <= tol || (hi - lo) <= tol) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return x;
}

void solve_linear(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double mag = std::abs(a[static_cast<std::size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double m = std::abs(a[static_cast<std::size_t>(r) * n + col]);
      if (m > mag) {
        mag = m;
        pivot = r;
      }
    }
    if (mag < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a[static_cast<std::size_t>(pivot) * n + c],
                  a[static_cast<std::size_t>(col) * n + c]);
      }
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[static_cast<std::size_t>(r) * n + col] * inv;
      if (factor == 0.0) continue;
      a[static_cast<std::size_t>(r) * n + col] = 0;
      for (int c = col + 1; c < n; ++c) {
        a[static_cast<std::size_t>(r) * n + c] -=
            factor * a[static_cast<std::size_t>(col) * n + c];
      }
      b[r] -= factor * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) {
      acc -= a[static_cast<std::size_t>(r) * n + c] * b[c];
    }
    b[r] = acc / a[static_cast<std::size_t>(r) * n + r];
  }
}

namespace {

struct BarrierWork {
  const ConvexProgram* p = nullptr;
  std::vector<int> bounded;  // indices with finite lower bounds

  double barrier_value(std::span<const double> x, double t, bool& ok) const {
    ok = true;
    double v = t * p->value(x);
    for (const auto& c : p->constraints) {
      const double g = c.value(x);
      if (g >= 0) {
        ok = false;
        return kInf;
      }
      v -= std::log(-g);
    }
    for (int i : bounded) {
      const double s = x[static_cast<std::size_t>(i)] - p->lower_bounds[static_cast<std::size_t>(i)];
      if (s <= 0) {
        ok = false;
        return kInf;
      }
      v -= std::log(s);
    }
    return v;
  }
};

}  // namespace

ConvexResult minimize_convex(const ConvexProgram& program, std::span<const double> x0,
                             double tol) {
  const int n = program.n;
  if (n <= 0 || static_cast<int>(x0.size()) != n) {
    throw std::invalid_argument("minimize_convex: bad dimensions");
  }
  const int p = static_cast<int>(program.eq_coeff.size());
  const int m = static_cast<int>(program.constraints.size());

  BarrierWork work;
  work.p = &program;
  for (int i = 0; i < n; ++i) {
    if (!program.lower_bounds.empty() && std::isfinite(program.lower_bounds[static_cast<std::size_t>(i)])) {
      work.bounded.push_back(i);
    }
  }
  const int barriers = m + static_cast<int>(work.bounded.size());

  std::vector<double> x(x0.begin(), x0.end());

  // Strict feasibility check; report the worst violation when it fails.
  {
    double worst = 0;
    std::string worst_name;
    bool interior = true;
    for (int i = 0; i < p; ++i) {
      double r = -program.eq_rhs[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) r += program.eq_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
      if (std::abs(r) > 1e-7) {
        interior = false;
        if (std::abs(r) > worst) {
          worst = std::abs(r);
          worst_name = "equality " + std::to_string(i);
        }
      }
    }
    for (int j = 0; j < m; ++j) {
      const double g = program.constraints[static_cast<std::size_t>(j)].value(x);
      if (g >= 0) {
        interior = false;
        if (g >= worst) {
          worst = g;
          worst_name = "inequality " + std::to_string(j);
        }
      }
    }
    for (int i : work.bounded) {
      const double s = x[static_cast<std::size_t>(i)] - program.lower_bounds[static_cast<std::size_t>(i)];
      if (s <= 0) {
        interior = false;
        if (-s >= worst) {
          worst = -s;
          worst_name = "lower bound " + std::to_string(i);
        }
      }
    }
    if (!interior) {
      throw std::runtime_error("minimize_convex: infeasible start (worst violation " +
                               std::to_string(worst) +
                               (worst_name.empty() ? "" : " at " + worst_name) + ")");
    }
  }

  const int dim = n + p;
  std::vector<double> grad(static_cast<std::size_t>(n));
  std::vector<double> hess(static_cast<std::size_t>(n) * n);
  std::vector<double> cgrad(static_cast<std::size_t>(n));
  std::vector<double> chess(static_cast<std::size_t>(n) * n);
  std::vector<double> kkt(static_cast<std::size_t>(dim) * dim);
  std::vector<double> rhs(static_cast<std::size_t>(dim));
  std::vector<double> eq_nu(static_cast<std::size_t>(p), 0.0);

  int newton_total = 0;
  double t = 1.0;
  const int max_outer = 64;

  for (int outer = 0; outer < max_outer; ++outer) {
    // Centering Newton steps at fixed t.
    for (int it = 0; it < 80; ++it) {
      program.gradient(x, grad);
      for (auto& v : grad) v *= t;
      program.hessian(x, hess);
      for (auto& v : hess) v *= t;

      for (int j = 0; j < m; ++j) {
        const auto& c = program.constraints[static_cast<std::size_t>(j)];
        const double g = c.value(x);
        c.gradient(x, cgrad);
        c.hessian(x, chess);
        const double inv_g = 1.0 / (-g);
        for (int r = 0; r < n; ++r) {
          grad[static_cast<std::size_t>(r)] += cgrad[static_cast<std::size_t>(r)] * inv_g;
          for (int cidx = 0; cidx < n; ++cidx) {
            hess[static_cast<std::size_t>(r) * n + cidx] +=
                cgrad[static_cast<std::size_t>(r)] * cgrad[static_cast<std::size_t>(cidx)] * inv_g * inv_g +
                chess[static_cast<std::size_t>(r) * n + cidx] * inv_g;
          }
        }
      }
      for (int i : work.bounded) {
        const double s = x[static_cast<std::size_t>(i)] - program.lower_bounds[static_cast<std::size_t>(i)];
        grad[static_cast<std::size_t>(i)] -= 1.0 / s;
        hess[static_cast<std::size_t>(i) * n + i] += 1.0 / (s * s);
      }

      std::fill(kkt.begin(), kkt.end(), 0.0);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) kkt[static_cast<std::size_t>(r) * dim + c] = hess[static_cast<std::size_t>(r) * n + c];
      }
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < n; ++j) {
          kkt[static_cast<std::size_t>(j) * dim + (n + i)] = program.eq_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          kkt[static_cast<std::size_t>(n + i) * dim + j] = program.eq_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
      }
      for (int j = 0; j < n; ++j) rhs[static_cast<std::size_t>(j)] = -grad[static_cast<std::size_t>(j)];
      for (int i = 0; i < p; ++i) rhs[static_cast<std::size_t>(n + i)] = 0.0;

      std::vector<double> mat = kkt;
      std::vector<double> sol = rhs;
      solve_linear(mat, sol, dim);
      ++newton_total;

      // Newton decrement: -grad . dx, nonnegative for a descent direction.
      double decrement = 0;
      for (int j = 0; j < n; ++j) decrement -= grad[static_cast<std::size_t>(j)] * sol[static_cast<std::size_t>(j)];
      for (int i = 0; i < p; ++i) eq_nu[static_cast<std::size_t>(i)] = sol[static_cast<std::size_t>(n + i)];

      if (decrement / 2.0 <= 1e-12 * std::max(1.0, t)) break;

      bool ok = false;
      const double base = work.barrier_value(x, t, ok);
      double alpha = 1.0;
      std::vector<double> trial(static_cast<std::size_t>(n));
      for (int ls = 0; ls < 60; ++ls) {
        for (int j = 0; j < n; ++j) trial[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + alpha * sol[static_cast<std::size_t>(j)];
        bool tok = false;
        const double tv = work.barrier_value(trial, t, tok);
        if (tok && tv <= base - 0.25 * alpha * decrement) break;
        alpha *= 0.5;
      }
      for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] += alpha * sol[static_cast<std::size_t>(j)];
      if (alpha < 1e-14) break;
    }

    if (barriers == 0) break;
    if (static_cast<double>(barriers) / t <= tol * 0.1) break;
    t *= 2.0;
  }

  ConvexResult result;
  result.x = x;
  result.objective = program.value(x);
  result.newton_iterations = newton_total;
  result.eq_multipliers.assign(static_cast<std::size_t>(p), 0.0);
  for (int i = 0; i < p; ++i) result.eq_multipliers[static_cast<std::size_t>(i)] = eq_nu[static_cast<std::size_t>(i)] / t;
  result.ineq_multipliers.assign(static_cast<std::size_t>(m), 0.0);
  result.bound_multipliers.assign(static_cast<std::size_t>(n), 0.0);

  // KKT residual of the original problem with barrier multipliers.
  std::vector<double> stat(static_cast<std::size_t>(n));
  program.gradient(x, stat);
  double comp = 0;
  for (int j = 0; j < m; ++j) {
    const auto& c = program.constraints[static_cast<std::size_t>(j)];
    const double g = c.value(x);
    const double lambda = 1.0 / (t * (-g));
    result.ineq_multipliers[static_cast<std::size_t>(j)] = lambda;
    comp = std::max(comp, std::abs(lambda * g));
    c.gradient(x, cgrad);
    for (int r = 0; r < n; ++r) stat[static_cast<std::size_t>(r)] += lambda * cgrad[static_cast<std::size_t>(r)];
  }
  for (int i : work.bounded) {
    const double s = x[static_cast<std::size_t>(i)] - program.lower_bounds[static_cast<std::size_t>(i)];
    const double mu = 1.0 / (t * s);
    result.bound_multipliers[static_cast<std::size_t>(i)] = mu;
    comp = std::max(comp, std::abs(mu * s));
    stat[static_cast<std::size_t>(i)] -= mu;
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) {
      stat[static_cast<std::size_t>(j)] += result.eq_multipliers[static_cast<std::size_t>(i)] *
                                           program.eq_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  double res = 0;
  for (int j = 0; j < n; ++j) res = std::max(res, std::abs(stat[static_cast<std::size_t>(j)]));
  for (int i = 0; i < p; ++i) {
    double r = -program.eq_rhs[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) r += program.eq_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    res = std::max(res, std::abs(r));
  }
  for (int j = 0; j < m; ++j) {
    res = std::max(res, std::max(0.0, program.constraints[static_cast<std::size_t>(j)].value(x)));
  }
  result.kkt_residual = std::max(res, comp);
  return result;
}

}  // namespace mecsfc::num
