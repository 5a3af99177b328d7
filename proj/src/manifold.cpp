#include "crdisc/manifold.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "crdisc/errors.hpp"

namespace crd {

namespace {
constexpr double kDomainSlack = 1e-12;
constexpr double kPiM = 3.14159265358979323846;
}  // namespace

GraphManifold GraphManifold::zero(int d) {
  require(d >= 1 && d <= 4, "manifold", "d must be in 1..4");
  GraphManifold m;
  m.d_ = d;
  m.family_ = ManifoldFamily::Zero;
  return m;
}

GraphManifold GraphManifold::quadratic(int d, std::vector<double> q) {
  require(d >= 1 && d <= 4, "manifold", "d must be in 1..4");
  require(static_cast<int>(q.size()) == d * d * d, "manifold", "quadratic family needs d^3 parameters");
  GraphManifold m;
  m.d_ = d;
  m.family_ = ManifoldFamily::Quadratic;
  m.params_ = q;
  m.q_.assign(d * d * d, 0.0);
  for (int j = 0; j < d; ++j)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        m.q_[(j * d + a) * d + b] = 0.5 * (q[(j * d + a) * d + b] + q[(j * d + b) * d + a]);
  return m;
}

GraphManifold GraphManifold::trig(int d, double a, double b, double w) {
  require(d >= 1 && d <= 4, "manifold", "d must be in 1..4");
  GraphManifold m;
  m.d_ = d;
  m.family_ = ManifoldFamily::Trig;
  m.params_ = {a, b, w};
  m.ta_ = a;
  m.tb_ = b;
  m.tw_ = w;
  return m;
}

GraphManifold GraphManifold::polynomial(int d, std::vector<PolyTerm> terms) {
  require(d >= 1 && d <= 4, "manifold", "d must be in 1..4");
  GraphManifold m;
  m.d_ = d;
  m.family_ = ManifoldFamily::Poly;
  for (const auto& t : terms) {
    require(t.component >= 0 && t.component < d, "manifold", "polynomial term component out of range");
    require(static_cast<int>(t.exps.size()) == d, "manifold", "polynomial term needs d exponents");
    int deg = 0;
    for (int e : t.exps) {
      require(e >= 0, "manifold", "negative exponent");
      deg += e;
    }
    require(deg >= 2, "manifold", "polynomial terms of degree < 2 break the normalization h(0) = 0, Dh(0) = 0");
    m.params_.push_back(t.component);
    m.params_.push_back(t.coef);
    for (int e : t.exps) m.params_.push_back(e);
  }
  m.terms_ = std::move(terms);
  return m;
}

GraphManifold GraphManifold::from_spec(const std::string& family, int d, const std::vector<double>& p, int zdim) {
  require(zdim >= 0 && zdim <= 2, "manifold", "zdim must be in 0..2");
  GraphManifold m;
  if (family == "zero") {
    m = zero(d);
  } else if (family == "quadratic") {
    std::vector<double> q = p;
    if (q.empty()) {
      q.assign(d * d * d, 0.0);
      for (int j = 0; j < d; ++j)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            double v = (a == b) ? (a == j ? 0.3 : -0.15) : (a + b == j + 1 ? 0.1 : 0.05);
            q[(j * d + a) * d + b] = v;
          }
    }
    m = quadratic(d, q);
  } else if (family == "trig") {
    if (p.empty()) {
      m = trig(d, 0.3, 0.2, 1.0);
    } else {
      require(p.size() == 3, "manifold", "trig family takes 3 parameters (a, b, w)");
      m = trig(d, p[0], p[1], p[2]);
    }
  } else if (family == "poly") {
    std::vector<PolyTerm> terms;
    if (p.empty()) {
      for (int j = 0; j < d; ++j) {
        PolyTerm t;
        t.component = j;
        t.coef = 0.3;
        t.exps.assign(d, 0);
        t.exps[j] = 3;
        terms.push_back(t);
        if (d > 1) {
          PolyTerm u;
          u.component = j;
          u.coef = 0.1;
          u.exps.assign(d, 0);
          u.exps[j] = 1;
          u.exps[(j + 1) % d] = 2;
          terms.push_back(u);
        }
      }
    } else {
      const std::size_t stride = 2 + d;
      require(p.size() % stride == 0, "manifold", "poly parameters come in groups of (component, coef, d exponents)");
      for (std::size_t i = 0; i < p.size(); i += stride) {
        PolyTerm t;
        t.component = static_cast<int>(p[i]);
        t.coef = p[i + 1];
        for (int a = 0; a < d; ++a) t.exps.push_back(static_cast<int>(p[i + 2 + a]));
        terms.push_back(t);
      }
    }
    m = polynomial(d, terms);
  } else {
    fail(ErrorKind::Input, "manifold", "unknown manifold family '" + family + "'");
  }
  m.zdim_ = zdim;
  return m;
}

std::string GraphManifold::family_name() const {
  switch (family_) {
    case ManifoldFamily::Zero: return "zero";
    case ManifoldFamily::Quadratic: return "quadratic";
    case ManifoldFamily::Trig: return "trig";
    case ManifoldFamily::Poly: return "poly";
  }
  return "?";
}

GraphManifold GraphManifold::with_zdim(int zdim) const {
  GraphManifold m = *this;
  m.zdim_ = zdim;
  return m;
}

double GraphManifold::z2_weight(const cplx* z2) const {
  if (zdim_ == 0 || z2 == nullptr) return 1.0;
  double w = 1.0;
  for (int i = 0; i < zdim_; ++i) w += std::norm(z2[i]);
  return w;
}

void GraphManifold::eval(const double* x, double* h, double* dh, double* d2h) const {
  const int d = d_;
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
  if (r2 > (1.0 + kDomainSlack) * (1.0 + kDomainSlack))
    fail(ErrorKind::Domain, "manifold", "point outside the unit ball: |x| = " + std::to_string(std::sqrt(r2)));
  if (h) std::fill(h, h + d, 0.0);
  if (dh) std::fill(dh, dh + d * d, 0.0);
  if (d2h) std::fill(d2h, d2h + d * d * d, 0.0);
  switch (family_) {
    case ManifoldFamily::Zero: break;
    case ManifoldFamily::Quadratic:
      for (int j = 0; j < d; ++j)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            const double q = q_[(j * d + a) * d + b];
            if (h) h[j] += q * x[a] * x[b];
            if (dh) dh[j * d + a] += 2.0 * q * x[b];
            if (d2h) d2h[(j * d + a) * d + b] = 2.0 * q;
          }
      break;
    case ManifoldFamily::Trig:
      for (int j = 0; j < d; ++j) {
        const int k = (j + 1) % d;
        const double xj = x[j];
        if (h) h[j] = ta_ * (1.0 - std::cos(tw_ * xj)) + tb_ * std::sin(x[0]) * std::sin(x[k]);
        if (dh) {
          dh[j * d + j] += ta_ * tw_ * std::sin(tw_ * xj);
          dh[j * d + 0] += tb_ * std::cos(x[0]) * std::sin(x[k]);
          dh[j * d + k] += tb_ * std::sin(x[0]) * std::cos(x[k]);
        }
        if (d2h) {
          d2h[(j * d + j) * d + j] += ta_ * tw_ * tw_ * std::cos(tw_ * xj);
          d2h[(j * d + 0) * d + 0] += -tb_ * std::sin(x[0]) * std::sin(x[k]);
          d2h[(j * d + k) * d + k] += -tb_ * std::sin(x[0]) * std::sin(x[k]);
          d2h[(j * d + 0) * d + k] += tb_ * std::cos(x[0]) * std::cos(x[k]);
          d2h[(j * d + k) * d + 0] += tb_ * std::cos(x[0]) * std::cos(x[k]);
        }
      }
      break;
    case ManifoldFamily::Poly:
      for (const auto& t : terms_) {
        auto mono = [&](const std::vector<int>& e) {
          double v = 1.0;
          for (int a = 0; a < d; ++a) {
            if (e[a] < 0) return 0.0;
            v *= std::pow(x[a], e[a]);
          }
          return v;
        };
        const int j = t.component;
        if (h) h[j] += t.coef * mono(t.exps);
        for (int a = 0; a < d; ++a) {
          if (t.exps[a] == 0) continue;
          auto ea = t.exps;
          ea[a] -= 1;
          if (dh) dh[j * d + a] += t.coef * t.exps[a] * mono(ea);
          if (!d2h) continue;
          for (int b = 0; b < d; ++b) {
            if (ea[b] == 0) continue;
            auto eb = ea;
            eb[b] -= 1;
            d2h[(j * d + a) * d + b] += t.coef * t.exps[a] * ea[b] * mono(eb);
          }
        }
      }
      break;
  }
}

void GraphManifold::h(const double* x, double* out, const cplx* z2) const {
  eval(x, out, nullptr, nullptr);
  const double w = z2_weight(z2);
  if (w != 1.0)
    for (int j = 0; j < d_; ++j) out[j] *= w;
}

void GraphManifold::dh(const double* x, double* out, const cplx* z2) const {
  eval(x, nullptr, out, nullptr);
  const double w = z2_weight(z2);
  if (w != 1.0)
    for (int j = 0; j < d_ * d_; ++j) out[j] *= w;
}

void GraphManifold::d2h(const double* x, double* out, const cplx* z2) const {
  eval(x, nullptr, nullptr, out);
  const double w = z2_weight(z2);
  if (w != 1.0)
    for (int j = 0; j < d_ * d_ * d_; ++j) out[j] *= w;
}

std::vector<double> GraphManifold::h(const std::vector<double>& x, const std::vector<cplx>& z2) const {
  require(static_cast<int>(x.size()) == d_, "manifold", "point dimension mismatch");
  std::vector<double> out(d_);
  h(x.data(), out.data(), z2.empty() ? nullptr : z2.data());
  return out;
}

bool GraphManifold::hessian_vanishes_at_origin() const {
  std::vector<double> x(d_, 0.0), out(d_ * d_ * d_);
  d2h(x.data(), out.data());
  for (double v : out)
    if (v != 0.0) return false;
  return true;
}

double GraphManifold::normalization_constant() const {
  const int d = d_;
  double c0 = 0.0;
  std::vector<double> hv(d), dv(d * d);
  auto visit = [&](const double* x) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
    if (r2 == 0.0) return;
    h(x, hv.data());
    dh(x, dv.data());
    double hn = 0.0, dn = 0.0;
    for (double v : hv) hn += v * v;
    for (double v : dv) dn += v * v;
    c0 = std::max(c0, std::sqrt(hn) / r2);
    c0 = std::max(c0, std::sqrt(dn) / std::sqrt(r2));
  };
  if (d == 1) {
    for (int i = -200; i <= 200; ++i) {
      double x = i / 200.0;
      visit(&x);
    }
  } else {
    // random-free polar/spherical scan: radii x directions from a lattice
    std::vector<double> x(d);
    const int nr = 40;
    const int per = d == 2 ? 64 : 12;
    std::vector<int> idx(d - 1, 0);
    for (int ir = 1; ir <= nr; ++ir) {
      const double r = static_cast<double>(ir) / nr;
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        // hyperspherical angles
        double s = 1.0;
        for (int a = 0; a < d - 1; ++a) {
          const double range = (a == d - 2) ? 2.0 * kPiM : kPiM;
          const double ang = range * (idx[a] + 0.5) / per;
          x[a] = r * s * std::cos(ang);
          s *= std::sin(ang);
        }
        x[d - 1] = r * s;
        visit(x.data());
        int a = 0;
        while (a < d - 1 && ++idx[a] == per) idx[a++] = 0;
        if (a == d - 1) break;
      }
    }
  }
  return c0;
}

double surrogate_distance(const GraphManifold& m, const cplx* z, const cplx* z2) {
  const int d = m.dim();
  double x[4] = {}, y[4] = {}, hv[4] = {};
  for (int a = 0; a < d; ++a) {
    x[a] = z[a].real();
    y[a] = z[a].imag();
  }
  m.h(x, hv, z2);
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += (y[a] - hv[a]) * (y[a] - hv[a]);
  return std::sqrt(s);
}

double surrogate_distance(const GraphManifold& m, const std::vector<cplx>& z) {
  require(static_cast<int>(z.size()) == m.dim(), "manifold", "point dimension mismatch");
  return surrogate_distance(m, z.data());
}

double true_distance(const GraphManifold& m, const std::vector<cplx>& z) {
  const int d = m.dim();
  require(static_cast<int>(z.size()) == d, "manifold", "point dimension mismatch");
  Eigen::VectorXd x(d), y(d);
  for (int a = 0; a < d; ++a) {
    x[a] = z[a].real();
    y[a] = z[a].imag();
  }
  auto objective = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd hv(d);
    m.h(p.data(), hv.data());
    return (p - x).squaredNorm() + (hv - y).squaredNorm();
  };
  double best = objective(x);
  std::vector<Eigen::VectorXd> starts{x};
  for (int a = 0; a < d; ++a)
    for (double s : {-0.05, 0.05}) {
      Eigen::VectorXd p = x;
      p[a] += s;
      if (p.norm() <= 1.0) starts.push_back(p);
    }
  for (auto p : starts) {
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd hv(d);
      Eigen::MatrixXd J(d, d);
      std::vector<double> H(d * d * d);
      m.h(p.data(), hv.data());
      {
        std::vector<double> jv(d * d);
        m.dh(p.data(), jv.data());
        for (int j = 0; j < d; ++j)
          for (int a = 0; a < d; ++a) J(j, a) = jv[j * d + a];
      }
      m.d2h(p.data(), H.data());
      Eigen::VectorXd r = hv - y;
      Eigen::VectorXd g = 2.0 * ((p - x) + J.transpose() * r);
      Eigen::MatrixXd hess = 2.0 * (Eigen::MatrixXd::Identity(d, d) + J.transpose() * J);
      for (int j = 0; j < d; ++j)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) hess(a, b) += 2.0 * r[j] * H[(j * d + a) * d + b];
      Eigen::VectorXd step = hess.ldlt().solve(-g);
      if (!step.allFinite() || g.dot(step) >= 0.0) step = -0.5 * g;
      const double f0 = objective(p);
      double lam = 1.0;
      Eigen::VectorXd next = p;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        next = p + lam * step;
        if (next.norm() <= 1.0 && objective(next) < f0) {
          moved = true;
          break;
        }
        lam *= 0.5;
      }
      if (!moved) break;
      p = next;
      if ((lam * step).norm() < 1e-14) break;
    }
    best = std::min(best, objective(p));
  }
  return std::sqrt(best);
}

DistanceCalibration calibrate_distance(const GraphManifold& m, double radius, double offset, int count,
                                       std::uint64_t seed) {
  const int d = m.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DistanceCalibration c;
  c.min_ratio = 1e300;
  c.max_ratio = 0.0;
  std::vector<double> x(d), w(d), hv(d);
  while (c.samples < count) {
    double nx = 0.0, nw = 0.0;
    for (int a = 0; a < d; ++a) {
      x[a] = radius * u(rng);
      w[a] = offset * u(rng);
      nx += x[a] * x[a];
      nw += w[a] * w[a];
    }
    if (nx > radius * radius || nw > offset * offset || nw == 0.0) continue;
    m.h(x.data(), hv.data());
    std::vector<cplx> z(d);
    for (int a = 0; a < d; ++a) z[a] = cplx(x[a], hv[a] + w[a]);
    const double s = surrogate_distance(m, z);
    const double t = true_distance(m, z);
    if (t <= 0.0) continue;
    c.min_ratio = std::min(c.min_ratio, s / t);
    c.max_ratio = std::max(c.max_ratio, s / t);
    ++c.samples;
  }
  c.constant = std::max(c.max_ratio, 1.0 / c.min_ratio);
  return c;
}

bool tube_membership(const GraphManifold& m, const std::vector<cplx>& z, const TubeSpec& t) {
  double nx = 0.0;
  for (const auto& v : z) nx += v.real() * v.real();
  if (nx > t.base_radius * t.base_radius) return false;
  return surrogate_distance(m, z) <= t.epsilon;
}

double unit_ball_volume(int d) { return std::pow(kPiM, d / 2.0) / std::tgamma(d / 2.0 + 1.0); }

TubeSamples sample_tube(const GraphManifold& m, const TubeSpec& t, int count, std::uint64_t seed) {
  const int d = m.dim();
  // y-range of the graph over the base ball, then pad by epsilon
  double ymax = m.normalization_constant() * t.base_radius * t.base_radius;
  const double ybox = ymax + t.epsilon;
  TubeSamples s;
  s.box_volume = std::pow(2.0 * t.base_radius, d) * std::pow(2.0 * ybox, d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> z(d);
  for (int i = 0; i < count; ++i) {
    for (int a = 0; a < d; ++a) z[a] = cplx(t.base_radius * u(rng), ybox * u(rng));
    ++s.drawn;
    if (tube_membership(m, z, t)) s.points.push_back(z);
  }
  return s;
}

}  // namespace crd
