#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crd {

using cplx = std::complex<double>;

/// Radial building blocks about a centre a, with s = |z - a|^2:
/// Log: log|z - a|, TruncLog: max(log|z - a|, -M), SmoothLog: log(|z - a|^2 + e^{-2M}) / 2, Quad: |z - a|^2.
enum class TermKind { Log, TruncLog, SmoothLog, Quad };

struct PshTerm {
  TermKind kind = TermKind::Log;
  std::vector<cplx> centre;
  double M = 0.0;
  double weight = 1.0;
  double value(const cplx* z) const;
  /// f'(s) and f''(s) of the profile u = f(|z - a|^2) away from its singular set.
  void profile_derivatives(double s, double& d1, double& d2) const;
  /// tr(u_{j kbar}) = n f'(s) + s f''(s), in closed form so harmonic terms give exactly 0.
  double trace(double s, int n) const;
  /// Radius of the kink sphere (TruncLog) or of the regularization (SmoothLog), else 0.
  double scale() const;
};

/// Uniform measure on the sphere |z - centre| = radius carrying `mass`; radius 0 is an atom.
struct Layer {
  std::vector<cplx> centre;
  double radius = 0.0;
  double mass = 0.0;
};

/// dd^c is (i/pi) d dbar and omega = dd^c |z|^2. The trace measure dd^c phi ^ omega^{n-1}
/// has density trace_factor(n) tr(phi_{j kbar}) against Lebesgue measure on R^{2n}.
double trace_factor(int n);

/// Psh function on C^n (n in {1, 2}) as a nonnegative combination of radial terms plus a constant.
class PshSample {
 public:
  PshSample() = default;
  PshSample(int n, std::vector<PshTerm> terms, double constant, std::string family, std::vector<double> params,
            std::uint64_t seed);

  int n() const { return n_; }
  const std::string& family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<PshTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }

  double operator()(const cplx* z) const;
  /// Complex Hessian phi_{j kbar} (row-major n x n) off the singular spheres and poles.
  void hessian(const cplx* z, cplx* out) const;
  /// Absolutely continuous part of the trace measure.
  double density(const cplx* z) const;
  /// Singular part of the trace measure: kink spheres and (n = 1) atoms at log poles.
  const std::vector<Layer>& layers() const { return layers_; }
  /// Centres of untruncated log terms, where the value is -inf.
  std::vector<std::vector<cplx>> poles() const;
  /// Point the quadratures grade toward (first singular centre, else the origin) and its scale.
  std::vector<cplx> focus() const;
  double focus_scale() const;
  bool smooth() const;
  /// L1 norm over the bidisc D_2^n, filled in by sample_psh.
  double l1() const { return l1_; }
  void set_l1(double v) { l1_ = v; }

 private:
  int n_ = 1;
  std::vector<PshTerm> terms_;
  double constant_ = 0.0;
  std::string family_;
  std::vector<double> params_;
  std::uint64_t seed_ = 0;
  std::vector<Layer> layers_;
  double l1_ = 0.0;
};

struct PshInvariantReport {
  /// max over test circles of phi(centre) - circle average (must be <= tolerance)
  double submean_excess = 0.0;
  double submean_tol = 0.0;
  int circles = 0;
  /// <dd^c phi, psi> and <phi, dd^c psi> for a bump psi
  double pairing_measure = 0.0;
  double pairing_function = 0.0;
  double pairing_tol = 0.0;
  bool ok() const;
};

/// Seeded random circles in complex lines plus the Green pairing against a bump of radius 1/2
/// around the focus.
PshInvariantReport check_psh_invariants(const PshSample& s, int res, std::uint64_t seed);

/// Families: const [c], log [centre], trunc-log [M, centre], smooth-log [M, centre], quad [centre],
/// sum [count, M] (trunc-logs with seeded centres in the ball of radius 0.6 and weights in [0.5, 1]).
/// A centre is given by 2n reals (re, im per coordinate) and defaults to the origin.
/// Computes the L1 norm over the bidisc of radius 2 and verifies both invariants; failures throw.
PshSample sample_psh(const std::string& family, int n, const std::vector<double>& params, std::uint64_t seed,
                     int res = 16);

struct PshFamilySpec {
  std::string name;
  std::string family;
  std::vector<double> params;
};
/// Seven built-in samples: const, log, trunc-log on and off K', smooth-log, quad and sum.
std::vector<PshFamilySpec> builtin_psh_families(int n);

// ---- quadrature ----------------------------------------------------------------------------

/// Points in R^dim with weights.
struct NodeSet {
  int dim = 0;
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
  const double* at(int i) const { return x.data() + static_cast<std::size_t>(i) * dim; }
  double sum(const std::function<double(const double*)>& f) const;
};

/// Midpoint cells in r: uniform on [0, scale], geometric up to rmax/8, uniform beyond (or uniform
/// throughout when scale is absent or large).
void radial_cells(double rmax, double scale, int n, std::vector<double>& r, std::vector<double>& dr);

/// Real ball of radius R about `centre` in R^dim, dim in {1, 2}, in polar coordinates about `focus`
/// (which must lie in the ball), radially graded at `scale`.
NodeSet real_ball_nodes(int dim, const double* centre, double R, const double* focus, int res, double scale);
/// Ball in C^n (n in {1, 2}) about `centre` in polar (n = 1) or Hopf (n = 2) coordinates.
NodeSet complex_ball_nodes(int n, const cplx* centre, double R, int res, double scale);
/// Uniform probability nodes on the sphere |z - centre| = R in C^n.
NodeSet sphere_nodes(int n, const cplx* centre, double R, int res);

/// Integral over the polydisc |z_j| < R; the rule in each factor is polar about focus[j].
double integrate_polydisc(int n, double R, const cplx* focus, int res, double scale,
                          const std::function<double(const cplx*)>& f);
/// Integral over a ball in C^n.
double integrate_complex_ball(int n, const cplx* centre, double R, int res, double scale,
                              const std::function<double(const cplx*)>& f);

/// L1 norm of phi over the bidisc D_2^n.
double psh_l1_norm(const PshSample& s, int res);
/// Trace mass of dd^c phi inside a set, given its indicator; layers are integrated on their spheres.
double layer_mass_in(const PshSample& s, const std::function<bool(const cplx*)>& inside, int res);

// ---- closed forms for max(log|z|, -M) ------------------------------------------------------

/// int over |z| < r of |max(log|z|, -M)| in C^n (r <= 1); M = inf gives log|z|.
double trunc_log_ball_l1(int n, double M, double r);
/// int over |z| < 2 in C of |max(log|z|, -M)|.
double trunc_log_disc2_l1(double M);
/// int over [-a, a] x [-b, b] of log|z|.
double log_rect_integral(double a, double b);
/// int over [-1, 1] x [-eps, eps] of |max(log|z|, -M)|, needs e^{-M} <= eps <= 1.
double trunc_log_strip_l1(double M, double eps);
/// dd^c mass of max(log|z|, -M) inside the strip |y| <= eps.
double trunc_log_strip_mass(double M, double eps);

// ---- convex surrogate ----------------------------------------------------------------------

/// g(t) = |t| log(|t| + 2)
double surrogate_g(double t);
double surrogate_g1(double t);
double surrogate_g2(double t);

/// g_k = g outside [-1/k, 1/k]; inside, g_k'' = q_k is affine on [-1/k, 0] and [0, 1/k] with
/// q_k(0) fixed so that g_k' matches g' at +-1/k.
class ConvexSurrogate {
 public:
  explicit ConvexSurrogate(int k);
  int k() const { return k_; }
  double q(double t) const;
  double q0() const { return q0_; }
  double value(double t) const;
  double d1(double t) const;
  /// min of q over [-1, 1]
  double min_q() const;
  /// sup over [-1, 1] of |g_k - g|
  double sup_gap() const;

 private:
  int k_;
  double q0_, q1_, c_;
};
ConvexSurrogate build_surrogate(int k);

}  // namespace crd
