#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace crd {

using cplx = std::complex<double>;

enum class ManifoldFamily { Zero, Quadratic, Trig, Poly };

struct PolyTerm {
  int component = 0;
  double coef = 0.0;
  std::vector<int> exps;
};

/// K' = {x + i h(x) : |x| <= 1} in normalized coordinates (h(0) = 0, Dh(0) = 0).
/// With zdim > 0 the map is h(x, z2) = (1 + |z2|^2) h(x).
class GraphManifold {
 public:
  static GraphManifold zero(int d);
  /// q holds d*d*d entries, q[(j*d + a)*d + b]; it is symmetrized in (a, b).
  static GraphManifold quadratic(int d, std::vector<double> q);
  /// h_j(x) = a (1 - cos(w x_j)) + b sin(x_1) sin(x_{j+1 mod d})
  static GraphManifold trig(int d, double a, double b, double w);
  static GraphManifold polynomial(int d, std::vector<PolyTerm> terms);
  /// Built from a family name and flat parameter list; empty params select defaults.
  static GraphManifold from_spec(const std::string& family, int d, const std::vector<double>& params, int zdim);

  int dim() const { return d_; }
  int zdim() const { return zdim_; }
  ManifoldFamily family() const { return family_; }
  std::string family_name() const;
  const std::vector<double>& params() const { return params_; }
  GraphManifold with_zdim(int zdim) const;

  /// out[j] = h_j(x); throws a domain error if |x| > 1.
  void h(const double* x, double* out, const cplx* z2 = nullptr) const;
  /// out[j*d + a] = dh_j/dx_a
  void dh(const double* x, double* out, const cplx* z2 = nullptr) const;
  /// out[(j*d + a)*d + b]
  void d2h(const double* x, double* out, const cplx* z2 = nullptr) const;
  std::vector<double> h(const std::vector<double>& x, const std::vector<cplx>& z2 = {}) const;

  bool hessian_vanishes_at_origin() const;
  /// max over a unit-ball scan of |h(x)|/|x|^2 and |Dh(x)|/|x|.
  double normalization_constant() const;

 private:
  void eval(const double* x, double* h, double* dh, double* d2h) const;
  double z2_weight(const cplx* z2) const;

  int d_ = 1;
  int zdim_ = 0;
  ManifoldFamily family_ = ManifoldFamily::Zero;
  std::vector<double> params_;
  std::vector<double> q_;
  double ta_ = 0, tb_ = 0, tw_ = 0;
  std::vector<PolyTerm> terms_;
};

/// |Im z - h(Re z)|
double surrogate_distance(const GraphManifold& m, const cplx* z, const cplx* z2 = nullptr);
double surrogate_distance(const GraphManifold& m, const std::vector<cplx>& z);
/// Euclidean distance to the graph by damped Newton from several starts.
double true_distance(const GraphManifold& m, const std::vector<cplx>& z);

struct DistanceCalibration {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// max(max_ratio, 1/min_ratio)
  double constant = 0.0;
  int samples = 0;
};
DistanceCalibration calibrate_distance(const GraphManifold& m, double radius, double offset, int count,
                                       std::uint64_t seed);

struct TubeSpec {
  double epsilon = 0.1;
  double base_radius = 0.5;
};

bool tube_membership(const GraphManifold& m, const std::vector<cplx>& z, const TubeSpec& t);

struct TubeSamples {
  std::vector<std::vector<cplx>> points;
  double box_volume = 0.0;
  int drawn = 0;
  double volume_estimate() const { return drawn ? box_volume * points.size() / drawn : 0.0; }
};
/// Uniform draws over the bounding box of the tube, kept when inside it.
TubeSamples sample_tube(const GraphManifold& m, const TubeSpec& t, int count, std::uint64_t seed);
/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

}  // namespace crd
