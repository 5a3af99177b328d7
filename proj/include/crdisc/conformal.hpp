#pragma once

#include <string>
#include <vector>

#include "crdisc/circle.hpp"

namespace crd {

/// Starlike domain about 0 given by its polar radius rho(phi).
/// Disc: rho = 1. Cap: rho = 1 on |phi| <= arc, then dips smoothly by depth over a
/// transition of the given width, so the boundary keeps a unit-circle arc around 1.
struct ConformalDomain {
  enum class Kind { Disc, Cap } kind = Kind::Disc;
  double arc = 0.6;
  double depth = 0.1;
  double width = 1.5;

  double rho(double phi) const;
  /// min over a boundary scan of rho^2 + 2 rho'^2 - rho rho'' (positive iff convex).
  double convexity_margin(int samples = 4096) const;
  static ConformalDomain parse(const std::string& name);
};

struct ConformalOptions {
  int modes = 128;
  double tol = 1e-12;
  int max_iter = 200;
};

/// Phi(z) = z exp(L(z)) from the unit disc onto the domain, with Phi(0) = 0 and Phi(1) = 1,
/// by Theodorsen iteration phi = theta + T1[log rho(phi)] on the boundary correspondence.
class ConformalMap {
 public:
  ConformalMap(const ConformalDomain& dom, const ConformalOptions& opt);

  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  const ConformalDomain& domain() const { return dom_; }
  /// sup |phi_{k+1} - phi_k| per iteration.
  const std::vector<double>& residuals() const { return residuals_; }
  /// sup over the boundary grid of | |Phi(e^{i theta})| - rho(arg Phi) |.
  double boundary_residual() const { return boundary_residual_; }
  double fixed_point_residual() const;

 private:
  ConformalDomain dom_;
  HolomorphicDiscFunction L_;
  std::vector<double> residuals_;
  double boundary_residual_ = 0.0;
};

}  // namespace crd
