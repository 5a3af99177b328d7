#pragma once

#include "crdisc/circle.hpp"

namespace crd {

struct SeedOptions {
  double arc_half_width = 0.6;
  int modes = 256;
  /// Radial nodes of the certification grid; angular nodes are 8x this.
  int grid = 64;
  /// The profile vanishes on |theta| <= arc_half_width + margin.
  double margin = 0.05;
  /// Smallest 1-|z| sampled by the certification grid.
  double rho_min = 1e-3;
  double derivative_tol = 1e-8;
  double arc_tol = 1e-10;
};

struct SeedFunction {
  BoundaryFunction u0;
  double theta_u0 = 0.0;
  double c_u0 = 0.0;
  int grid = 0;
  /// Point of the certification grid where the minimum ratio is attained.
  cplx argmin{};
  /// |d/dx u0(1) + 1| evaluated spectrally on the truncated series.
  double derivative_residual = 0.0;
  /// sup |u0| over the vanishing arc.
  double arc_residual = 0.0;
  /// Fraction of (pi - theta_zero) used by the transition of the accepted candidate.
  double transition = 0.0;
};

/// Smooth step 0 -> 1 on [0, 1], flat to all orders at both ends.
double smooth_step(double x);

/// d/dx u(1) via (1/2pi) int u(e^{i theta}) / (cos theta - 1) d theta (u must vanish near 1).
double boundary_x_derivative_integral(const std::vector<double>& samples);
/// d/dx of the Poisson extension at z = 1, spectrally: sum_k |k| c_k.
double boundary_x_derivative_spectral(const BoundaryFunction& u);

struct RatioScan {
  double min_ratio = 0.0;
  cplx argmin{};
};
/// min of u(z) / (1 - |z|) over the polar certification grid.
RatioScan certification_scan(const BoundaryFunction& u, int grid, double rho_min);

SeedFunction construct_seed(const SeedOptions& opt);

}  // namespace crd
