#pragma once

#include <memory>
#include <vector>

#include "crdisc/bishop.hpp"

namespace crd {

class ConformalMap;

/// One disc z -> F(z, tau) = U(z) + i P(z) + i t u0(z) tau1*.
class DiscMember {
 public:
  DiscMember(const BishopProblem& prob, BishopSolution sol);

  const DiscParams& params() const { return sol_.params; }
  const BishopSolution& solution() const { return sol_; }
  /// Boundary data of P: h(U) projected onto the solver modes.
  const std::vector<BoundaryFunction>& P() const { return P_; }
  /// Real and imaginary boundary data of each component.
  const std::vector<BoundaryFunction>& re() const { return re_; }
  const std::vector<BoundaryFunction>& im() const { return im_; }
  int dim() const { return static_cast<int>(re_.size()); }

  void eval(cplx z, cplx* out) const;
  /// out_x[j] = dF_j/dx, out_y[j] = dF_j/dy from the harmonic fields.
  void gradient(cplx z, cplx* out_x, cplx* out_y) const;
  /// Values on a polar grid: result[j][i][k] for component j, radius i, angle k.
  std::vector<std::vector<std::vector<cplx>>> polar_grid(std::span<const double> radii, int n_theta) const;
  /// Tail estimate of the spectral truncation across all boundary data of this disc.
  double truncation_error() const;

 private:
  BishopSolution sol_;
  std::vector<BoundaryFunction> P_, re_, im_;
  std::vector<HolomorphicDiscFunction> a_, b_;
};

struct FamilyOptions {
  double t = 0.0;
  /// tau nodes per coordinate axis (d >= 2); nodes span [-extent, extent].
  int tau_nodes = 3;
  double tau_extent = 0.75;
  SolverOptions solver;
};

class DiscFamily {
 public:
  DiscFamily(std::shared_ptr<const BishopProblem> prob, const FamilyOptions& opt);

  const BishopProblem& problem() const { return *prob_; }
  std::shared_ptr<const BishopProblem> problem_ptr() const { return prob_; }
  const FamilyOptions& options() const { return opt_; }
  double t() const { return opt_.t; }
  int dim() const { return prob_->manifold().dim(); }
  const std::vector<DiscMember>& members() const { return members_; }

  /// Solve for an arbitrary tau at the family's t.
  DiscMember member(const std::vector<double>& tau1, const std::vector<double>& tau2) const;
  DiscParams params_for(const std::vector<double>& tau1, const std::vector<double>& tau2) const;

  /// F(z) of the given member, composed with the reparametrization when present.
  void eval(const DiscMember& m, cplx z, cplx* out) const;
  void gradient(const DiscMember& m, cplx z, cplx* out_x, cplx* out_y) const;

  DiscFamily reparametrized(std::shared_ptr<const ConformalMap> phi) const;
  bool reparametrized() const { return phi_ != nullptr; }
  const ConformalMap* reparam() const { return phi_.get(); }

  double truncation_error() const;

 private:
  std::shared_ptr<const BishopProblem> prob_;
  FamilyOptions opt_;
  std::vector<DiscMember> members_;
  std::shared_ptr<const ConformalMap> phi_;
};

/// tau grid of the family (empty tau vectors for d = 1).
std::vector<std::pair<std::vector<double>, std::vector<double>>> tau_grid(int d, int nodes, double extent);

DiscFamily build_family(std::shared_ptr<const BishopProblem> prob, const FamilyOptions& opt);

/// det of the real 2d x 2d differential in (z, tau), tau columns by central differences.
class JacobianContext {
 public:
  JacobianContext(const DiscFamily& fam, const std::vector<double>& tau1, const std::vector<double>& tau2,
                  double fd_step);
  double det(cplx z) const;
  const DiscMember& center() const { return center_; }

 private:
  const DiscFamily* fam_;
  DiscMember center_;
  std::vector<DiscMember> plus_, minus_;
  double step_;
};

struct JacobianValue {
  double value = 0.0;
  double half_step_value = 0.0;
  double rel_change = 0.0;
};
JacobianValue jacobian(const DiscFamily& fam, cplx z, const std::vector<double>& tau1,
                       const std::vector<double>& tau2, double fd_step);

/// Points of B(1, r0) intersected with the disc: 1-|z| geometric in [s_min, 0.9 r0].
struct RegionGrid {
  double r0 = 0.3;
  double s_min = 1e-3;
  int n_s = 12;
  int n_theta = 9;
  RegionGrid refined() const { return {r0, s_min, 2 * n_s - 1, 2 * n_theta - 1}; }
  std::vector<cplx> points() const;
};

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
  cplx argmin{};
  cplx argmax{};
  int count = 0;
};

/// |det DF| / (t^{2d} (1-|z|)^{d-1}) over region x family tau grid.
RatioRange verify_jacobian_bound(const DiscFamily& fam, const RegionGrid& region, double fd_step);
/// surrogate distance of F(z, tau) over t(1-|z|), same grid.
RatioRange verify_distance_bounds(const DiscFamily& fam, const RegionGrid& region);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int points = 0;
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Log-log slope of |det DF| against 1-|z| along theta = 0 at the central tau.
SlopeFit degeneration_slope(const DiscFamily& fam, double s_min, double s_max, int n, double fd_step);

struct AttachmentReport {
  double residual = 0.0;
  double truncation = 0.0;
  int points = 0;
};
/// sup over the vanishing arc x tau grid of the surrogate distance of F(e^{i theta}, tau).
AttachmentReport verify_attachment(const DiscFamily& fam, int n_theta);

/// sup over an interior polar grid of |dF/dy - i dF/dx|.
double cauchy_riemann_residual(const DiscFamily& fam, int n_r, int n_theta);

struct CoverageReport {
  bool injective = false;
  double min_pair_distance = 0.0;
  double collision_tol = 0.0;
  double resolution = 0.0;  // longest image edge between mesh neighbours
  double covering_radius = 0.0;
  double radius = 0.0;       // t * eps_hat
  double eps_hat = 0.0;
  int mesh_points = 0;
  std::vector<std::vector<double>> image;  // Re F over the mesh
};
CoverageReport boundary_coverage(const DiscFamily& fam, const std::vector<double>& tau1, int n_theta, int n_tau2);

}  // namespace crd
