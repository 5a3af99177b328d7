#include "crdisc/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crdisc/errors.hpp"
#include "crdisc/seed.hpp"

namespace crd {

namespace {

double wrap(double phi) {
  phi = std::remainder(phi, 2.0 * kPi);
  return phi;
}

}  // namespace

double ConformalDomain::rho(double phi) const {
  if (kind == Kind::Disc) return 1.0;
  const double a = std::abs(wrap(phi));
  return 1.0 - depth * smooth_step((a - arc) / width);
}

double ConformalDomain::convexity_margin(int samples) const {
  const double h = 1e-4;
  double best = 1e300;
  for (int i = 0; i < samples; ++i) {
    const double p = 2.0 * kPi * i / samples;
    const double r = rho(p);
    const double r1 = (rho(p + h) - rho(p - h)) / (2.0 * h);
    const double r2 = (rho(p + h) - 2.0 * r + rho(p - h)) / (h * h);
    best = std::min(best, r * r + 2.0 * r1 * r1 - r * r2);
  }
  return best;
}

ConformalDomain ConformalDomain::parse(const std::string& name) {
  ConformalDomain d;
  if (name == "disc") {
    d.kind = Kind::Disc;
  } else if (name == "cap") {
    d.kind = Kind::Cap;
  } else {
    fail(ErrorKind::Input, "conformal", "unknown domain '" + name + "' (expected disc or cap)");
  }
  return d;
}

ConformalMap::ConformalMap(const ConformalDomain& dom, const ConformalOptions& opt) : dom_(dom) {
  require(opt.modes >= 8, "conformal", "need at least 8 modes");
  if (dom.kind == ConformalDomain::Kind::Cap) {
    require(dom.depth > 0.0 && dom.depth < 1.0 && dom.width > 0.0 && dom.arc > 0.0 &&
                dom.arc + dom.width < kPi,
            "conformal", "cap parameters out of range");
    if (dom.convexity_margin() <= 0.0) fail(ErrorKind::Experimental, "conformal", "cap domain is not convex");
  }
  const int m = 4 * opt.modes;
  std::vector<double> theta(m), phi(m), logr(m);
  for (int j = 0; j < m; ++j) phi[j] = theta[j] = 2.0 * kPi * j / m;
  BoundaryFunction f;
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    for (int j = 0; j < m; ++j) logr[j] = std::log(dom.rho(phi[j]));
    f = analyze(logr, opt.modes);
    auto shift = synthesize(t1_transform(f), m);
    double res = 0.0;
    for (int j = 0; j < m; ++j) {
      const double next = theta[j] + shift[j];
      res = std::max(res, std::abs(next - phi[j]));
      phi[j] = next;
    }
    residuals_.push_back(res);
    if (res <= opt.tol) {
      converged = true;
      break;
    }
    const std::size_t n = residuals_.size();
    if (n >= 4 && residuals_[n - 1] >= residuals_[n - 2] && residuals_[n - 2] >= residuals_[n - 3]) break;
  }
  if (!converged) {
    std::ostringstream os;
    os << "Theodorsen iteration did not converge (last residual " << residuals_.back() << ")";
    fail(ErrorKind::Experimental, "conformal", os.str());
  }
  for (int j = 0; j < m; ++j) logr[j] = std::log(dom.rho(phi[j]));
  f = analyze(logr, opt.modes);
  L_ = cauchy_transform(f);
  L_.add_constant(cplx(0.0, -hilbert_transform(f)(0.0)));
  for (int j = 0; j < m; ++j) {
    const cplx w = (*this)(std::polar(1.0, theta[j]));
    boundary_residual_ = std::max(boundary_residual_, std::abs(std::abs(w) - dom.rho(std::arg(w))));
  }
}

cplx ConformalMap::operator()(cplx z) const { return z * std::exp(L_(z)); }

cplx ConformalMap::derivative(cplx z) const { return std::exp(L_(z)) * (1.0 + z * L_.derivative(z)); }

double ConformalMap::fixed_point_residual() const { return residuals_.empty() ? 0.0 : residuals_.back(); }

}  // namespace crd
