#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mecsfc::num {

// Principal-branch Lambert W: the w >= -1 solution of w * exp(w) = x.
// Domain x >= -1/e; throws std::domain_error outside it.
// Residual |w*e^w - x| <= 1e-12 * max(1, |x|).
double lambert_w0(double x);

struct KnapsackItem {
  int id = 0;
  double value = 0;  // >= 0
  double size = 0;   // >= 0, real-valued
};

// Exact 0/1 knapsack with real sizes: maximizes total value subject to
// total size <= capacity. Branch and bound with a fractional relaxation
// bound; exact for the instance sizes used here (n <= 64). Ties are broken
// deterministically: larger value, then smaller total size, then
// lexicographically smallest id set. Returns selected ids sorted ascending.
std::vector<int> solve_knapsack(std::span<const KnapsackItem> items, double capacity);

// Root of a continuous function with a sign change on [lo, hi]. Bisection
// with a secant acceleration step; stops when |f(x)| <= tol or the bracket
// width falls below tol. Throws std::invalid_argument without a sign change.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-10);

// Smooth convex program
//   minimize f(x)
//   s.t.     eq_coeff[i] . x = eq_rhs[i]
//            constraints[j](x) <= 0
//            x[k] >= lower_bounds[k]
// Objective and constraints supply value/gradient/dense-Hessian callbacks.
struct ConvexProgram {
  int n = 0;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  // Fills an n*n row-major dense Hessian.
  std::function<void(std::span<const double>, std::span<double>)> hessian;

  std::vector<std::vector<double>> eq_coeff;
  std::vector<double> eq_rhs;

  struct Constraint {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::function<void(std::span<const double>, std::span<double>)> hessian;
  };
  std::vector<Constraint> constraints;

  std::vector<double> lower_bounds;  // use -inf entries for unbounded variables
};

struct ConvexResult {
  std::vector<double> x;
  double objective = 0;
  std::vector<double> eq_multipliers;
  std::vector<double> ineq_multipliers;
  std::vector<double> bound_multipliers;
  double kkt_residual = 0;
  int newton_iterations = 0;
};

// Log-barrier Newton method with backtracking line search; the barrier
// weight is halved (t doubled) each outer round until the duality gap and
// KKT residuals are below tol. Requires a strictly feasible x0 and throws
// std::runtime_error with the worst violation when it is not.
ConvexResult minimize_convex(const ConvexProgram& program, std::span<const double> x0,
                             double tol = 1e-8);

// Dense linear solve A x = b with partial pivoting; A is n*n row-major and
// is overwritten. Throws std::runtime_error on (numerical) singularity.
void solve_linear(std::vector<double>& a, std::vector<double>& b, int n);

}  // namespace mecsfc::num
