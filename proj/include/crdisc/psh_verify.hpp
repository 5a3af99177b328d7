#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "crdisc/family.hpp"
#include "crdisc/manifold.hpp"
#include "crdisc/psh.hpp"

namespace crd {

struct PshOptions {
  int res = 16;
  /// dyadic set eps_max 2^-k, k < eps_count; refinement inserts geometric midpoints
  int eps_count = 6;
  double eps_max = 0.25;
  /// sublevel enlargement: a is the sup of phi_1 on {rho <= lambda eps}
  double lambda = 2.0;
  /// weight exponent of the weighted pullback
  double delta = 0.5;
  int surrogate_k = 16;
  /// multipliers A and B in A dd^c(g_k o f) >= df ^ d^c f - B ||D^2 f|| omega
  double surrogate_a = 12.0;
  double surrogate_b = -1.0;  // < 0 selects 2n
  std::uint64_t seed = 1;
};

struct RatioRow {
  double param = 0.0;
  double num = 0.0;
  double den = 0.0;
  double ratio = 0.0;
};

/// One measured quantity at the base resolution and after one refinement.
struct Series {
  std::string name;
  std::vector<RatioRow> rows, refined;
  double sup = 0.0, sup_refined = 0.0;
  /// relative change of the sup under refinement
  double change = 0.0;
  /// informational rows do not enter the verdict
  bool gating = true;
  bool pass = false;
  std::string note;
};

struct LemmaReport {
  std::string lemma;
  std::string family;
  int n = 1;
  std::vector<Series> series;
  double slope = 0.0;
  double slope_threshold = 0.0;
  bool has_slope = false;
  bool pass = false;
  std::string note;
  const Series* find(const std::string& name) const;
};

/// Sup-ratio verdict: finite sups that agree within 10% (or both below `floor`, reported vacuous).
void finish_ratio_series(Series& s, double floor = 1e-10);
void finish_report(LemmaReport& r);

/// Dyadic radii or epsilons eps_max 2^-k; `refined` adds the geometric midpoints.
std::vector<double> dyadic_set(double top, int count, bool refined);

/// Inverse of g(t) = t log(t + 2) on t >= 0.
double surrogate_g_inverse(double v);

LemmaReport verify_log_volume(const PshSample& s, const PshOptions& opt);
/// Surrogate tube {|x| <= 1, |y - h(x)| <= eps} around K'.
LemmaReport verify_tube_l1(const PshSample& s, const GraphManifold& m, const PshOptions& opt);
LemmaReport verify_tube_ddc(const PshSample& s, const GraphManifold& m, const PshOptions& opt);
/// T = dd^c phi on A = {|x| <= 1/2} intersected with {rho <= eps}, rho = sum g(y_j - h_j(x)),
/// phi_1 = |y - h(x)|^2; p = 0 always and p = 1 when n = 2.
LemmaReport verify_sublevel(const PshSample& s, const GraphManifold& m, const PshOptions& opt);
/// Independent of any psh sample: margins for f_j = y_j - h_j(x), a linear f, and a curved f that is
/// reported without gating.
LemmaReport verify_surrogate(int n, const GraphManifold& m, const PshOptions& opt);

/// Complex Hessian (row-major) from the real Hessian in coordinates (x_1..x_n, y_1..y_n).
void complex_hessian_from_real(int n, const double* real, cplx* out);
/// Complex and real Hessian of phi_1 = |y - h(x)|^2 at z.
void phi1_hessian(const GraphManifold& m, const cplx* z, cplx* out, double* real_out = nullptr);
/// Mixed measure density of dd^c u ^ dd^c v on C^2 for complex Hessians u, v.
double mixed_density(const cplx* u, const cplx* v);

/// Quadrature of max(log|z|, -M) against its closed forms (balls, the disc of radius 2, the strip
/// around R in C and its dd^c mass); each must agree to 1%.
struct ClosedFormCheck {
  std::string name;
  double quadrature = 0.0;
  double closed = 0.0;
  double rel_err = 0.0;
  bool pass = false;
};
std::vector<ClosedFormCheck> closed_form_checks(int res = 16);

// ---- pullbacks along the disc family -------------------------------------------------------

/// F and F' of one member on a polar grid in s = 1 - |z|, graded toward the boundary.
struct DiscGrid {
  int d = 1;
  const DiscMember* member = nullptr;
  std::vector<double> s, ds;
  int n_theta = 0;
  /// node (i, k): F at [(i * n_theta + k) * d + j]
  std::vector<cplx> F, dF;
  cplx z(int i, int k) const;
  double area(int i, int k) const;
};

/// Discretized positive measure on the disc.
struct DiscMeasure {
  std::vector<cplx> z;
  std::vector<double> mass;
  double total() const;
  /// sum of mass (1 - |z|)^delta
  double weighted(double delta) const;
  /// sum over 1 - |z| <= 2 eps of mass (1 - |z|)
  double annulus(double eps) const;
  /// sup over eps in [emin, emax] of annulus(eps) / eps^kappa
  double annulus_sup(double kappa, double emin, double emax, double* argmax = nullptr) const;
  int atoms = 0;
  int segments = 0;
};

/// dd^c (phi o F) of one member: absolutely continuous part, pulled-back kink curves found by
/// marching squares, and (n = 1) atoms at the preimages of log poles.
DiscMeasure pullback_measure(const PshSample& s, const DiscFamily& fam, const DiscGrid& g);

/// <dd^c(phi o F), psi> by the measure and by int (phi o F) Delta psi / (2 pi), psi a bump of
/// radius 0.95 about 0.
struct PairingCheck {
  double measure = 0.0;
  double function = 0.0;
  double tol = 0.0;
  bool ok() const;
};
PairingCheck pullback_pairing_check(const PshSample& s, const DiscFamily& fam, const DiscGrid& g, int res);

/// Disc data shared by the pullback verifiers, built lazily per refinement level.
class PullbackContext {
 public:
  PullbackContext(std::shared_ptr<const DiscFamily> fam, int res);
  const DiscFamily& family() const { return *fam_; }
  int dim() const { return fam_->dim(); }
  int res(int level) const { return res_ << level; }
  /// radius of B(0, t eps_hat) in K' covered by the boundary arcs
  double coverage_radius() const { return radius_; }
  struct BoundaryNode {
    std::vector<cplx> F;
    double w;
  };
  /// Nodes of the arc x tau box with midpoint weights.
  const std::vector<BoundaryNode>& boundary(int level) const;
  const std::vector<DiscGrid>& grids(int level) const;

 private:
  std::shared_ptr<const DiscFamily> fam_;
  int res_;
  double radius_ = 0.0;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<std::vector<BoundaryNode>>> boundary_;
  mutable std::vector<std::unique_ptr<std::vector<DiscGrid>>> grids_;
};

/// Disc family on the default quadratic graph at half the discovered t_max.
std::shared_ptr<const DiscFamily> reference_family(int d, const std::string& manifold = "quadratic");
std::shared_ptr<const DiscFamily> reference_family(const GraphManifold& m);
/// Process-wide context over reference_family(m).
const PullbackContext& shared_pullback_context(const GraphManifold& m, int res);

/// int_{|x| <= r} g(x + i h(x)) dx against int over the arc x tau box of g o F, for g = 1 and
/// g = |phi|.
LemmaReport verify_pullback(const PshSample& s, const PullbackContext& ctx, const PshOptions& opt);
/// int (1 - |z|)^delta dd^c(phi o F) over ||phi||^gamma per member, and the annulus masses
/// against eps^kappa, kappa = 1 - delta (n - 1) / (delta + n - 1).
LemmaReport verify_weighted_pullback(const PshSample& s, const PullbackContext& ctx, const PshOptions& opt);

extern const std::vector<std::string> kPshLemmas;

/// One lemma on every built-in sample at the given n; samples and discs are shared per process.
std::vector<LemmaReport> run_psh_lemma(const std::string& lemma, int n, const PshOptions& opt);
const std::vector<PshSample>& builtin_samples(int n, int res, std::uint64_t seed);

}  // namespace crd
