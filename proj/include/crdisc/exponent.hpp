#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crdisc/family.hpp"
#include "crdisc/manifold.hpp"
#include "crdisc/psh.hpp"

namespace crd {

/// One radial term of a pair, evaluated at level M in phi_1 and at M + gap in phi_2; only
/// TruncLog and SmoothLog are accepted, both decrease in M so phi_1 >= phi_2.
struct PairTerm {
  TermKind kind = TermKind::TruncLog;
  std::vector<cplx> centre;
  double weight = 1.0;
};

/// Built-in generators, with M the sweep parameter:
///   trunc-log      max(log|z|, -M), singularity at 0 on K'
///   trunc-log-off  the same about a point at distance off_distance from K'
///   trunc-log-sum  four weighted trunc-logs with seeded centres, two on K' and two in the ball of radius 0.6
///   smooth-log     log(|z|^2 + e^{-2M}) / 2
struct PairFamily {
  std::string name;
  int n = 1;
  std::vector<PairTerm> terms;
  double gap = 2.0;
  /// difference multiplier, for the scale-invariance property
  double scale = 1.0;

  double difference(const cplx* z, double M) const;
  PshSample phi(double M) const;
};

extern const std::vector<std::string> kExponentFamilies;
constexpr double kOffDistance = 0.02;

PairFamily make_pair_family(const std::string& name, const GraphManifold& m, std::uint64_t seed, double gap = 2.0);

struct ExponentOptions {
  int res = 16;
  double gap = 2.0;
  /// log the chain of intermediate bounds next to each measurement
  bool chain = true;
  double delta = 0.5;
  double beta0 = 0.5;
  double beta = 1.5;
  int eps_count = 6;
};

/// Default sweep M = 2, 2.5, ..., 8.
std::vector<double> default_sweep();
/// "a:b:step" or a comma list.
std::vector<double> parse_sweep(const std::string& text);

/// Intermediate quantities along the disc family at one sweep point, with g = phi_1 - phi_2:
/// arc: int_{|x| <= r} g over int_{arc x tau} g o F; weighted: sup over members of
/// int (1 - |z|)^delta dd^c(phi_j o F) over ||phi_j||^gamma; trace: sup over members and eps of the
/// boundary integral of g o F against the interpolated bound.
struct ChainRow {
  bool computed = false;
  double arc_lhs = 0.0, arc_rhs = 0.0, arc_ratio = 0.0;
  double weighted = 0.0, weighted_den = 0.0, weighted_ratio = 0.0;
  double trace_lhs = 0.0, trace_rhs = 0.0, trace_ratio = 0.0;
  bool finite() const;
};

struct ExponentPoint {
  double M = 0.0;
  /// int over D_2^n of phi_1 - phi_2
  double x = 0.0;
  /// int over K' of phi_1 - phi_2 against its volume
  double y = 0.0;
  /// closed forms where they exist (NaN otherwise)
  double x_closed = 0.0, y_closed = 0.0;
  /// min of phi_1 - phi_2 over the sampled grid
  double order_min = 0.0;
  bool used = false;
  ChainRow chain;
};

struct ExponentExperiment {
  std::string manifold;
  std::string family;
  int d = 1;
  std::uint64_t seed = 0;
  std::vector<double> sweep;
  std::vector<ExponentPoint> points;
  SlopeFit fit;
  /// 1 / (3d) and the floor 1 / (3d) - 0.05
  double guarantee = 0.0;
  double floor = 0.0;
  double margin = 0.0;
  bool monotone = false;
  /// |slope(c x, c y) - slope(x, y)|
  double scale_error = 0.0;
  bool chain_bounded = true;
  bool pass = false;
  std::string note;
};

/// Measures x and y by direct quadrature over the sweep; the chain runs in parallel on the
/// reference disc family of m when opt.chain is set.
ExponentExperiment run_exponent_experiment(const GraphManifold& m, const std::string& family,
                                           const std::vector<double>& sweep, std::uint64_t seed,
                                           const ExponentOptions& opt = {});
ExponentExperiment run_exponent_experiment(const GraphManifold& m, const PairFamily& family,
                                           const std::vector<double>& sweep, std::uint64_t seed,
                                           const ExponentOptions& opt = {});

/// int over D_2^n and over K' of the difference at level M.
double pair_plane_l1(const PairFamily& f, double M, int res);
double pair_trace_integral(const PairFamily& f, const GraphManifold& m, double M, int res);

struct ExponentSummary {
  std::string manifold;
  std::string family;
  int d = 1;
  double slope = 0.0;
  double residual = 0.0;
  double guarantee = 0.0;
  double margin = 0.0;
  bool pass = false;
};
std::vector<ExponentSummary> aggregate_report(const std::vector<ExponentExperiment>& experiments);

}  // namespace crd
