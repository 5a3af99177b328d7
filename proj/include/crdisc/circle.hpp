#pragma once

#include <complex>
#include <span>
#include <vector>

namespace crd {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

/// Real function on the unit circle, stored as c_k for 0 <= k <= N.
/// Negative modes are implied by c_{-k} = conj(c_k); c_0 is kept real.
class BoundaryFunction {
 public:
  BoundaryFunction() = default;
  explicit BoundaryFunction(int modes);
  static BoundaryFunction from_coefficients(std::vector<cplx> c);
  static BoundaryFunction constant(int modes, double value);
  /// a cos(k theta) + b sin(k theta)
  static BoundaryFunction trig(int modes, int k, double a, double b);

  int modes() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return c_; }
  /// Coefficient for any signed k; zero beyond the stored modes.
  cplx coeff(int k) const;
  double mean() const { return c_.empty() ? 0.0 : c_[0].real(); }

  double operator()(double theta) const;
  /// Values on the uniform grid theta_j = 2 pi j / grid.
  std::vector<double> samples(int grid) const;
  /// Tail mass over the top quarter of the stored modes, floored at round-off.
  double truncation_error() const;

  BoundaryFunction derivative(int order = 1) const;
  BoundaryFunction resized(int modes) const;

  BoundaryFunction& operator+=(const BoundaryFunction& o);
  BoundaryFunction& operator-=(const BoundaryFunction& o);
  BoundaryFunction& operator*=(double s);
  friend BoundaryFunction operator+(BoundaryFunction a, const BoundaryFunction& b) { return a += b; }
  friend BoundaryFunction operator-(BoundaryFunction a, const BoundaryFunction& b) { return a -= b; }
  friend BoundaryFunction operator*(double s, BoundaryFunction a) { return a *= s; }

  void add_constant(double v) { c_[0] += v; }

 private:
  std::vector<cplx> c_;
};

/// Samples must sit on the uniform grid 2 pi j / M with M >= 2 modes + 1.
BoundaryFunction analyze(std::span<const double> samples, int modes);
/// Same, but validates that `theta` is the uniform grid the samples were taken on.
BoundaryFunction analyze(std::span<const double> theta, std::span<const double> samples, int modes);
std::vector<double> synthesize(const BoundaryFunction& f, int grid);

BoundaryFunction hilbert_transform(const BoundaryFunction& f);
BoundaryFunction t1_transform(const BoundaryFunction& f);

/// Polynomial sum_k a_k z^k on the closed disc.
class HolomorphicDiscFunction {
 public:
  HolomorphicDiscFunction() = default;
  explicit HolomorphicDiscFunction(std::vector<cplx> a) : a_(std::move(a)) {}
  const std::vector<cplx>& coeffs() const { return a_; }
  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  cplx second_derivative(cplx z) const;
  void add_constant(cplx c) { a_[0] += c; }

 private:
  std::vector<cplx> a_;
};

/// c_0 + 2 sum_{k>0} c_k z^k: real part f, imaginary part hilbert_transform(f) on the circle.
HolomorphicDiscFunction cauchy_transform(const BoundaryFunction& f);

/// Poisson extension u(r e^{i theta}) = sum c_k r^|k| e^{ik theta}.
class HarmonicField {
 public:
  HarmonicField() = default;
  explicit HarmonicField(BoundaryFunction src);
  const BoundaryFunction& source() const { return src_; }
  double operator()(cplx z) const;
  /// (d/dx, d/dy)
  std::pair<double, double> gradient(cplx z) const;
  double laplacian(cplx) const { return 0.0; }
  /// Row per radius, n_theta uniform angles starting at 0.
  std::vector<std::vector<double>> polar_grid(std::span<const double> radii, int n_theta) const;
  double truncation_error() const { return src_.truncation_error(); }
  const HolomorphicDiscFunction& holomorphic() const { return g_; }

 private:
  BoundaryFunction src_;
  HolomorphicDiscFunction g_;
};

HarmonicField poisson_extend(const BoundaryFunction& f);

/// C^k norm plus the Holder-beta seminorm of the k-th derivative, t = k + beta.
/// Derivatives are spectral; the seminorm runs over all pairs of the uniform grid whose
/// arc separation lies in [one grid step, 1].
double holder_norm(const BoundaryFunction& g, double t, int grid);
/// Same convention for raw samples on the uniform grid (analyzed first).
double holder_norm(std::span<const double> samples, double t);

}  // namespace crd
