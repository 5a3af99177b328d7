#include "crdisc/seed.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "crdisc/errors.hpp"

namespace crd {

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double boundary_x_derivative_integral(const std::vector<double>& samples) {
  const int m = static_cast<int>(samples.size());
  double s = 0.0;
  for (int j = 1; j < m; ++j) {
    const double th = 2.0 * kPi * j / m;
    s += samples[j] / (std::cos(th) - 1.0);
  }
  // trapezoid on a periodic integrand: (1/2pi) * (2pi/m) * sum
  return s / m;
}

double boundary_x_derivative_spectral(const BoundaryFunction& u) {
  double s = 0.0;
  for (int k = 1; k <= u.modes(); ++k) s += 2.0 * k * u.coeffs()[k].real();
  return s;
}

RatioScan certification_scan(const BoundaryFunction& u, int grid, double rho_min) {
  std::vector<double> radii(grid);
  for (int i = 0; i < grid; ++i) {
    const double frac = grid == 1 ? 0.0 : static_cast<double>(i) / (grid - 1);
    radii[i] = 1.0 - std::pow(rho_min, frac);
  }
  const int n_theta = 8 * grid;
  auto rows = poisson_extend(u).polar_grid(radii, n_theta);
  RatioScan best{std::numeric_limits<double>::infinity(), {}};
  for (int i = 0; i < grid; ++i) {
    const double w = 1.0 - radii[i];
    for (int j = 0; j < n_theta; ++j) {
      const double ratio = rows[i][j] / w;
      if (ratio < best.min_ratio) {
        best.min_ratio = ratio;
        best.argmin = std::polar(radii[i], 2.0 * kPi * j / n_theta);
      }
    }
  }
  return best;
}

namespace {

std::vector<double> profile_samples(double theta_zero, double transition, int m) {
  std::vector<double> s(m);
  const double width = transition * (kPi - theta_zero);
  for (int j = 0; j < m; ++j) {
    double th = 2.0 * kPi * j / m;
    if (th > kPi) th -= 2.0 * kPi;
    s[j] = smooth_step((std::abs(th) - theta_zero) / width);
  }
  return s;
}

}  // namespace

SeedFunction construct_seed(const SeedOptions& opt) {
  require(opt.arc_half_width > 0.0 && opt.arc_half_width < kPi / 2.0, "seed",
          "arc half-width must lie in (0, pi/2)");
  require(opt.modes >= 8, "seed", "seed needs at least 8 modes");
  require(opt.grid >= 4, "seed", "certification grid too small");
  require(opt.margin >= 0.0 && opt.arc_half_width + opt.margin < kPi / 2.0, "seed", "margin out of range");

  const double theta_zero = opt.arc_half_width + opt.margin;
  const int m = 8 * opt.modes;
  std::ostringstream why;
  for (double transition : {1.0, 0.85, 0.7}) {
    auto raw = profile_samples(theta_zero, transition, m);
    const double d = boundary_x_derivative_integral(raw);
    const double scale = -1.0 / d;
    for (double& v : raw) v *= scale;
    BoundaryFunction u = analyze(raw, opt.modes);

    SeedFunction s;
    s.u0 = u;
    s.theta_u0 = opt.arc_half_width;
    s.grid = opt.grid;
    s.transition = transition;
    s.derivative_residual = std::abs(boundary_x_derivative_spectral(u) + 1.0);
    auto vals = synthesize(u, m);
    for (int j = 0; j < m; ++j) {
      double th = 2.0 * kPi * j / m;
      if (th > kPi) th -= 2.0 * kPi;
      if (std::abs(th) <= opt.arc_half_width) s.arc_residual = std::max(s.arc_residual, std::abs(vals[j]));
    }
    auto scan = certification_scan(u, opt.grid, opt.rho_min);
    s.c_u0 = scan.min_ratio;
    s.argmin = scan.argmin;
    if (s.c_u0 > 0.0 && s.derivative_residual <= opt.derivative_tol && s.arc_residual <= opt.arc_tol) return s;
    why << " transition " << transition << ": min ratio " << s.c_u0 << " at (" << scan.argmin.real() << ", "
        << scan.argmin.imag() << "), derivative residual " << s.derivative_residual << ", arc residual "
        << s.arc_residual << ";";
  }
  fail(ErrorKind::Construction, "seed", "no candidate passed certification:" + why.str());
}

}  // namespace crd
