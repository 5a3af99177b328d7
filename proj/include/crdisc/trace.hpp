#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crdisc/circle.hpp"
#include "crdisc/dictionary.hpp"

namespace crd {

class DiscFamily;
class DiscMember;
class PshSample;

/// Polar midpoint rule on the unit disc: nr uniform radial cells, nth angles.
struct DiscRule {
  int nr = 0, nth = 0;
  std::vector<cplx> z;
  std::vector<double> w;
  static DiscRule make(int nr, int nth);
  /// Same rule on the band r0 <= |z| <= 1.
  static DiscRule band(double r0, int nr, int nth);
};

/// Nonnegative C^2 function on the closed disc with its dd^c density (against dx dy, so
/// dd^c v = Delta v / (2 pi)).
struct TraceCandidate {
  std::string name;
  std::function<double(cplx)> v;
  std::function<double(cplx)> ddc;
  /// pointwise majorant of |dd^c v| built from positive currents (for v = (phi1 - phi2) o F the
  /// sum of both pullbacks); |ddc| when empty
  std::function<double(cplx)> ddc_major;
  bool ddc_positive = false;

  int res = 16;
  DiscRule rule;
  std::vector<double> values, density, major;
  /// v on boundary_grid(res) uniform boundary nodes
  std::vector<double> boundary;
  double fd_residual = 0.0;
  double fd_tol = 0.0;

  int boundary_grid() const { return 16 * res; }
  double boundary_integral() const;
  double l1() const;
  /// int (1 - |z|)^beta0 of the majorant: the exact bound for the C^{-beta0} norm of a positive current
  double weighted_mass(double beta0) const;
  /// int over 1 - 2 eps <= |z| <= 1 of (1 - |z|) times the majorant, on a dedicated band rule
  double annulus(double eps) const;
  CurrentOnDisc current(int n) const;
};

struct CandidateOptions {
  bool nonnegative = true;
  bool ddc_positive = false;
  std::function<double(cplx)> ddc_major;
};

/// Samples the candidate on the rule of resolution res and checks v >= 0 and dd^c v against a
/// five-point Laplacian; violations throw.
TraceCandidate make_candidate(const std::string& name, std::function<double(cplx)> v, std::function<double(cplx)> ddc,
                              int res, const CandidateOptions& opt = {});
/// Same function resampled at another resolution.
TraceCandidate resample(const TraceCandidate& c, int res);

/// int log(|z - eta| / |1 - z conj(eta)|) rho(eta) dA(eta), with rho given on `rule` and by
/// callable near the diagonal, where a smooth partition hands a disc of radius 4 / rule.nr around
/// z to a local polar rule.
double green_potential(const DiscRule& rule, const std::vector<double>& rho_on_rule,
                       const std::function<double(cplx)>& rho, cplx z);

struct RieszReport {
  std::string name;
  int points = 0;
  /// sup over the test grid of |v - harmonic - green| at res and 2 res
  double error = 0.0;
  double error_refined = 0.0;
  /// Richardson estimate |green(res) - green(2 res)| plus the Poisson truncation
  double quad_tol = 0.0;
  double green_at_0 = 0.0;
  double harmonic_at_0 = 0.0;
  bool pass = false;
};
/// v = P[v|boundary] + G[dd^c v] on an interior test grid (|z| <= 0.9); `refined` is the same
/// candidate at twice the resolution, resampled when absent.
RieszReport riesz_decompose(const TraceCandidate& c, const TraceCandidate* refined = nullptr);

/// f(eta) = int_{|z| < 1/2} log(|z - eta| / |1 - z conj(eta)|) in closed form.
double green_average_closed(cplx eta);

struct GreenRegularity {
  double boundary_max = 0.0;            // max |f| on boundary nodes, by quadrature
  double f0 = 0.0, f0_closed = 0.0;     // f(0)
  double max_rel_err = 0.0;             // quadrature against the closed form on a test grid
  std::vector<double> alpha, norm, norm_refined, change;
  bool pass = false;
};
GreenRegularity green_kernel_regularity(int res = 16);

struct Lemma53Row {
  std::string name;
  double boundary = 0.0;
  double neg_norm = 0.0;
  double integral = 0.0;
  double ratio = 0.0;
};
/// int_{boundary} v / (||dd^c v||_{-beta} + int_D v), the norm a dictionary lower bound.
Lemma53Row boundary_l1_bound(const TraceCandidate& c, double beta, const Dictionary& d, int current_grid = 128);

struct CutoffEstimate {
  double eps = 0.0;
  double l1_term = 0.0;
  double annulus_term = 0.0;
  double bound = 0.0;
  /// dictionary estimate of ||dd^c v||_{-2}
  double neg_norm = 0.0;
};
CutoffEstimate cutoff_c2_estimate(const TraceCandidate& c, double eps, const Dictionary* d = nullptr,
                                  int current_grid = 128);

struct TraceBound {
  double gamma = 0.0;
  double lhs = 0.0;
  double l1 = 0.0;
  double n0 = 0.0;        // weighted-mass bound of ||dd^c v||_{-beta0}
  double annulus = 0.0;
  double terms[3] = {0.0, 0.0, 0.0};
  double rhs = 0.0;
  double ratio = 0.0;
};
/// gamma from beta = gamma beta0 + (1 - gamma) 2.
double trace_gamma(double beta0, double beta);
/// l1 + eps^{-2(1 - gamma)} n0^gamma l1^{1 - gamma} + n0^gamma annulus^{1 - gamma} against lhs.
TraceBound interpolated_bound(double lhs, double l1, double n0, double annulus, double beta0, double beta,
                              double eps);
TraceBound trace_interpolated_bound(const TraceCandidate& c, double beta0, double beta, double eps);

struct TraceOptions {
  int res = 16;
  double beta = 1.5;
  double beta0 = 0.5;
  /// eps in the dyadic set 2^-k, 1 <= k <= eps_count
  int eps_count = 6;
  int dictionary_level = 4;
  int current_grid = 128;
  std::uint64_t seed = 1;
};

/// Smooth nonnegative candidates: constants, harmonic, cap, bowl and seeded bump sums.
std::vector<TraceCandidate> builtin_trace_candidates(int res, std::uint64_t seed);
/// v = (phi1 - phi2) o F(., tau) over the members of the reference families, phi1 >= phi2 nested
/// smoothed logs.
std::vector<TraceCandidate> pullback_trace_candidates(int res);
TraceCandidate pullback_candidate(const std::string& name, const PshSample& phi1, const PshSample& phi2,
                                  std::shared_ptr<const DiscFamily> fam, int member, int res);

struct TraceCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct TraceSuiteReport {
  std::string id;
  std::vector<TraceCheck> checks;
  bool pass = false;
};
/// lemma53: Riesz reconstruction, Green-kernel regularity, v = 1 ratio, family ratio under
/// dictionary enrichment, scaling and the cutoff estimate.
TraceSuiteReport verify_lemma53(const TraceOptions& opt);
/// prop54: the interpolated bound over pullback candidates and eps, refinement stability, and
/// the sandwich of dictionary norms under the weighted mass.
TraceSuiteReport verify_prop54(const TraceOptions& opt);

}  // namespace crd
