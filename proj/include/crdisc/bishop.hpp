#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "crdisc/circle.hpp"
#include "crdisc/manifold.hpp"
#include "crdisc/seed.hpp"

namespace crd {

struct DiscParams {
  std::vector<double> tau1;  // R^{d-1}
  std::vector<double> tau2;  // R^{d-1}
  double t = 0.1;
  std::vector<cplx> z2;  // empty unless the manifold has a z2 slot

  std::vector<double> tau1_star() const;  // (1, tau1)
  std::vector<double> tau2_star() const;  // (0, tau2)
  void validate(int d) const;
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 500;
  double relaxation = 1.0;
  /// Consecutive non-decreasing defects tolerated before declaring contraction failure.
  int window = 3;
};

struct BishopSolution {
  std::vector<BoundaryFunction> U;
  DiscParams params;
  double residual = 0.0;
  int iterations = 0;
  double contraction = 0.0;
  std::vector<double> defects;
};

/// U = t tau2* - T1(h(U)) - t T1(u0) tau1*, solved by (optionally damped) Picard iteration.
class BishopProblem {
 public:
  BishopProblem(GraphManifold m, SeedFunction seed, int modes);

  const GraphManifold& manifold() const { return m_; }
  const SeedFunction& seed() const { return seed_; }
  int modes() const { return modes_; }
  int grid() const { return grid_; }
  const BoundaryFunction& u0() const { return u0_; }
  const BoundaryFunction& t1u0() const { return t1u0_; }

  /// Closed-form solution for h = 0, also the default initial guess.
  std::vector<BoundaryFunction> linear_part(const DiscParams& p) const;
  /// Right-hand side of the fixed-point equation, evaluated with h(U) sampled on `grid` points.
  std::vector<BoundaryFunction> rhs(const std::vector<BoundaryFunction>& U, const DiscParams& p, int grid) const;
  /// Projection of h(U) onto the retained modes, sampled on `grid` points.
  std::vector<BoundaryFunction> h_of(const std::vector<BoundaryFunction>& U, const DiscParams& p, int grid) const;
  /// sup over the grid of |U - rhs(U)|.
  double defect(const std::vector<BoundaryFunction>& U, const DiscParams& p, int grid) const;

  BishopSolution solve(const DiscParams& p, const SolverOptions& opt,
                       const std::vector<BoundaryFunction>* initial = nullptr) const;

 private:
  GraphManifold m_;
  SeedFunction seed_;
  int modes_;
  int grid_;
  BoundaryFunction u0_;
  BoundaryFunction t1u0_;
};

/// sup over theta of the Euclidean norm of U(theta).
double sup_norm(const std::vector<BoundaryFunction>& U, int grid);

/// One solve per z2 grid point; errors carry the offending z2.
std::vector<BishopSolution> solve_bishop_parametrized(const BishopProblem& prob, const DiscParams& p,
                                                      const std::vector<std::vector<cplx>>& z2_grid,
                                                      const SolverOptions& opt);

/// Reference tau set used by t_max discovery: the corners and centre of [-1,1]^{2(d-1)} slices.
std::vector<DiscParams> reference_params(int d, double t);

struct TmaxResult {
  double t_max = 0.0;
  int steps = 0;
};
/// Largest t (up to `cap`) for which every reference solve converges, by bisection.
TmaxResult find_t_max(const BishopProblem& prob, const SolverOptions& opt, double cap = 0.999, int steps = 24);

/// Centre solve plus the neighbouring solves needed for tau finite differences.
struct SolutionStencil {
  BishopSolution center;
  double delta = 0.0;
  int order = 0;
  /// plus[i], minus[i] for tau coordinate i (tau1 coordinates first, then tau2)
  std::vector<BishopSolution> plus, minus;
  /// mixed[(i*n + j)] for i < j: solutions at +-delta in i and j, in the order ++, +-, -+, --
  std::vector<std::vector<BishopSolution>> mixed;
};

SolutionStencil build_stencil(const BishopProblem& prob, const DiscParams& p, int order, double delta,
                              const SolverOptions& opt);
/// max over derivatives D^j_{(xi, tau)} of total order j of the C^{1/2} norm (max over components).
double solution_holder_report(const SolutionStencil& s, int order, int grid);

}  // namespace crd
