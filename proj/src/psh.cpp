#include "crdisc/psh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/parallel.hpp"

namespace crd {

namespace {

double dist2(const cplx* z, const std::vector<cplx>& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(z[j] - a[j]);
  return s;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// 4 res angular cells for a single complex coordinate, so n = 1 rules are finer than the factors of n = 2
int plane_res(int n, int res) { return n == 1 ? 4 * res : res; }

std::vector<cplx> read_centre(int n, const std::vector<double>& p, std::size_t off, const std::string& fam) {
  std::vector<cplx> c(n, 0.0);
  if (p.size() <= off) return c;
  require(p.size() == off + 2 * static_cast<std::size_t>(n), "psh",
          fam + ": a centre needs " + std::to_string(2 * n) + " reals");
  for (int j = 0; j < n; ++j) c[j] = cplx(p[off + 2 * j], p[off + 2 * j + 1]);
  return c;
}

}  // namespace

double PshTerm::value(const cplx* z) const {
  const double s = dist2(z, centre);
  switch (kind) {
    case TermKind::Log: return weight * 0.5 * std::log(s);
    case TermKind::TruncLog: return weight * std::max(0.5 * std::log(s), -M);
    case TermKind::SmoothLog: return weight * 0.5 * std::log(s + std::exp(-2.0 * M));
    case TermKind::Quad: return weight * s;
  }
  return 0.0;
}

void PshTerm::profile_derivatives(double s, double& d1, double& d2) const {
  d1 = d2 = 0.0;
  switch (kind) {
    case TermKind::TruncLog:
      if (s <= std::exp(-2.0 * M)) return;
      [[fallthrough]];
    case TermKind::Log:
      d1 = 0.5 / s;
      d2 = -0.5 / (s * s);
      return;
    case TermKind::SmoothLog: {
      const double q = s + std::exp(-2.0 * M);
      d1 = 0.5 / q;
      d2 = -0.5 / (q * q);
      return;
    }
    case TermKind::Quad: d1 = 1.0; return;
  }
}

double PshTerm::trace(double s, int n) const {
  switch (kind) {
    case TermKind::TruncLog:
      if (s <= std::exp(-2.0 * M)) return 0.0;
      [[fallthrough]];
    case TermKind::Log: return (n - 1) / (2.0 * s);
    case TermKind::SmoothLog: {
      const double q = s + std::exp(-2.0 * M);
      return (n * q - s) / (2.0 * q * q);
    }
    case TermKind::Quad: return n;
  }
  return 0.0;
}

double PshTerm::scale() const {
  return (kind == TermKind::TruncLog || kind == TermKind::SmoothLog) ? std::exp(-M) : 0.0;
}

double trace_factor(int n) { return n == 1 ? 2.0 / kPi : 4.0 / (kPi * kPi); }

PshSample::PshSample(int n, std::vector<PshTerm> terms, double constant, std::string family,
                     std::vector<double> params, std::uint64_t seed)
    : n_(n), terms_(std::move(terms)), constant_(constant), family_(std::move(family)),
      params_(std::move(params)), seed_(seed) {
  require(n == 1 || n == 2, "psh", "psh samples live in C^1 or C^2");
  for (const auto& t : terms_) {
    require(static_cast<int>(t.centre.size()) == n, "psh", "term centre has wrong dimension");
    require(t.weight >= 0.0, "psh", "term weights must be nonnegative");
    if (t.kind == TermKind::TruncLog) {
      const double R = std::exp(-t.M);
      layers_.push_back({t.centre, R, t.weight * (n == 1 ? 1.0 : 2.0 * R * R)});
    } else if (t.kind == TermKind::Log && n == 1) {
      layers_.push_back({t.centre, 0.0, t.weight});
    }
  }
}

double PshSample::operator()(const cplx* z) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.value(z);
  return v;
}

void PshSample::hessian(const cplx* z, cplx* out) const {
  for (int i = 0; i < n_ * n_; ++i) out[i] = 0.0;
  for (const auto& t : terms_) {
    const double s = dist2(z, t.centre);
    if (n_ == 1) {
      out[0] += t.weight * t.trace(s, 1);
      continue;
    }
    double d1, d2;
    t.profile_derivatives(s, d1, d2);
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        const cplx wj = z[j] - t.centre[j], wk = z[k] - t.centre[k];
        out[j * n_ + k] += t.weight * ((j == k ? d1 : 0.0) + d2 * std::conj(wj) * wk);
      }
  }
}

double PshSample::density(const cplx* z) const {
  double tr = 0.0;
  for (const auto& t : terms_) tr += t.weight * t.trace(dist2(z, t.centre), n_);
  return trace_factor(n_) * tr;
}

std::vector<std::vector<cplx>> PshSample::poles() const {
  std::vector<std::vector<cplx>> p;
  for (const auto& t : terms_)
    if (t.kind == TermKind::Log) p.push_back(t.centre);
  return p;
}

std::vector<cplx> PshSample::focus() const {
  for (const auto& t : terms_)
    if (t.kind != TermKind::Quad) return t.centre;
  return std::vector<cplx>(n_, 0.0);
}

double PshSample::focus_scale() const {
  for (const auto& t : terms_)
    if (t.kind != TermKind::Quad) return t.scale();
  return 0.0;
}

bool PshSample::smooth() const {
  for (const auto& t : terms_)
    if (t.kind == TermKind::Log || t.kind == TermKind::TruncLog) return false;
  return true;
}

// ---- quadrature ----------------------------------------------------------------------------

double NodeSet::sum(const std::function<double(const double*)>& f) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += w[i] * f(at(i));
  return s;
}

void radial_cells(double rmax, double scale, int n, std::vector<double>& r, std::vector<double>& dr) {
  r.clear();
  dr.clear();
  if (!(scale > 0.0) || scale >= rmax / 8.0) {
    const double h = rmax / n;
    for (int i = 0; i < n; ++i) {
      r.push_back((i + 0.5) * h);
      dr.push_back(h);
    }
    return;
  }
  // n/4 cells on [0, scale], geometric cells of ratio e^{8/n} until they reach the bulk spacing
  // rmax/n at rmax/8, then uniform
  const int n1 = std::max(2, n / 4);
  const double h = scale / n1;
  for (int i = 0; i < n1; ++i) {
    r.push_back((i + 0.5) * h);
    dr.push_back(h);
  }
  const double dt = 8.0 / n, rg = rmax / 8.0;
  const int n2 = std::max(1, static_cast<int>(std::ceil(std::log(rg / scale) / dt)));
  const double a = std::log(scale), dg = (std::log(rg) - a) / n2;
  for (int i = 0; i < n2; ++i) {
    const double lo = std::exp(a + i * dg), hi = std::exp(a + (i + 1) * dg);
    r.push_back(0.5 * (lo + hi));
    dr.push_back(hi - lo);
  }
  const int n3 = std::max(1, static_cast<int>(std::ceil((rmax - rg) / (rmax / n))));
  const double h3 = (rmax - rg) / n3;
  for (int i = 0; i < n3; ++i) {
    r.push_back(rg + (i + 0.5) * h3);
    dr.push_back(h3);
  }
}

NodeSet real_ball_nodes(int dim, const double* centre, double R, const double* focus, int res, double scale) {
  require(dim == 1 || dim == 2, "psh", "real balls are 1- or 2-dimensional here");
  require(R > 0.0 && res >= 2, "psh", "bad ball rule");
  NodeSet ns;
  ns.dim = dim;
  std::vector<double> r, dr;
  if (dim == 1) {
    const double f = focus[0];
    for (int side = -1; side <= 1; side += 2) {
      const double len = side < 0 ? f - (centre[0] - R) : centre[0] + R - f;
      if (len <= 0.0) continue;
      radial_cells(len, scale, 4 * res, r, dr);
      for (std::size_t i = 0; i < r.size(); ++i) {
        ns.x.push_back(f + side * r[i]);
        ns.w.push_back(dr[i]);
      }
    }
    return ns;
  }
  const cplx c(centre[0], centre[1]), p(focus[0], focus[1]);
  const cplx d = p - c;
  require(std::abs(d) < R, "psh", "focus must lie inside the ball");
  const int nth = 2 * res;
  const double dth = 2.0 * kPi / nth;
  for (int k = 0; k < nth; ++k) {
    const cplx e = std::polar(1.0, (k + 0.5) * dth);
    const double b = (std::conj(d) * e).real();
    const double rmax = -b + std::sqrt(b * b - std::norm(d) + R * R);
    radial_cells(rmax, scale, res, r, dr);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const cplx z = p + r[i] * e;
      ns.x.push_back(z.real());
      ns.x.push_back(z.imag());
      ns.w.push_back(r[i] * dr[i] * dth);
    }
  }
  return ns;
}

NodeSet complex_ball_nodes(int n, const cplx* centre, double R, int res, double scale) {
  require(n == 1 || n == 2, "psh", "complex balls live in C^1 or C^2");
  if (n == 1) {
    const double c[2] = {centre[0].real(), centre[0].imag()};
    return real_ball_nodes(2, c, R, c, plane_res(1, res), scale);
  }
  NodeSet ns;
  ns.dim = 4;
  std::vector<double> r, dr;
  radial_cells(R, scale, 2 * res, r, dr);
  const int ne = std::max(4, res / 2), nx = res;
  const double de = 0.5 * kPi / ne, dx = 2.0 * kPi / nx;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (int a = 0; a < ne; ++a) {
      const double eta = (a + 0.5) * de;
      const double wr = r[i] * r[i] * r[i] * dr[i] * std::sin(eta) * std::cos(eta) * de * dx * dx;
      for (int b = 0; b < nx; ++b)
        for (int c = 0; c < nx; ++c) {
          const cplx z1 = centre[0] + std::polar(r[i] * std::cos(eta), (b + 0.5) * dx);
          const cplx z2 = centre[1] + std::polar(r[i] * std::sin(eta), (c + 0.5) * dx);
          ns.x.insert(ns.x.end(), {z1.real(), z1.imag(), z2.real(), z2.imag()});
          ns.w.push_back(wr);
        }
    }
  return ns;
}

NodeSet sphere_nodes(int n, const cplx* centre, double R, int res) {
  require(n == 1 || n == 2, "psh", "spheres live in C^1 or C^2");
  NodeSet ns;
  ns.dim = 2 * n;
  if (n == 1) {
    const int m = 256 * res;
    for (int k = 0; k < m; ++k) {
      const cplx z = centre[0] + std::polar(R, 2.0 * kPi * (k + 0.5) / m);
      ns.x.insert(ns.x.end(), {z.real(), z.imag()});
      ns.w.push_back(1.0 / m);
    }
    return ns;
  }
  const int ne = res, nx = 2 * res;
  const double de = 0.5 * kPi / ne;
  double total = 0.0;
  for (int a = 0; a < ne; ++a) {
    const double eta = (a + 0.5) * de;
    const double we = std::sin(eta) * std::cos(eta);
    for (int b = 0; b < nx; ++b)
      for (int c = 0; c < nx; ++c) {
        const cplx z1 = centre[0] + std::polar(R * std::cos(eta), 2.0 * kPi * (b + 0.5) / nx);
        const cplx z2 = centre[1] + std::polar(R * std::sin(eta), 2.0 * kPi * (c + 0.5) / nx);
        ns.x.insert(ns.x.end(), {z1.real(), z1.imag(), z2.real(), z2.imag()});
        ns.w.push_back(we);
        total += we;
      }
  }
  for (double& w : ns.w) w /= total;
  return ns;
}

double integrate_polydisc(int n, double R, const cplx* focus, int res, double scale,
                          const std::function<double(const cplx*)>& f) {
  require(n == 1 || n == 2, "psh", "polydiscs live in C^1 or C^2");
  const double o[2] = {0.0, 0.0};
  std::vector<NodeSet> rule;
  for (int j = 0; j < n; ++j) {
    const double p[2] = {focus[j].real(), focus[j].imag()};
    rule.push_back(real_ball_nodes(2, o, R, p, plane_res(n, res), scale));
  }
  const NodeSet& a = rule[0];
  std::vector<double> part(a.size(), 0.0);
  parallel_for(a.size(), [&](int i) {
    cplx z[2] = {cplx(a.at(i)[0], a.at(i)[1]), 0.0};
    if (n == 1) {
      part[i] = a.w[i] * f(z);
      return;
    }
    const NodeSet& b = rule[1];
    double s = 0.0;
    for (int k = 0; k < b.size(); ++k) {
      z[1] = cplx(b.at(k)[0], b.at(k)[1]);
      s += b.w[k] * f(z);
    }
    part[i] = a.w[i] * s;
  });
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

double integrate_complex_ball(int n, const cplx* centre, double R, int res, double scale,
                              const std::function<double(const cplx*)>& f) {
  if (n == 1) {
    const NodeSet ns = complex_ball_nodes(1, centre, R, res, scale);
    return ns.sum([&](const double* x) { return f(reinterpret_cast<const cplx*>(x)); });
  }
  require(n == 2, "psh", "complex balls live in C^1 or C^2");
  // same nodes as complex_ball_nodes, generated per radial cell
  std::vector<double> r, dr;
  radial_cells(R, scale, 2 * res, r, dr);
  const int ne = std::max(4, res / 2), nx = res;
  const double de = 0.5 * kPi / ne, dx = 2.0 * kPi / nx;
  std::vector<cplx> ex(nx);
  for (int b = 0; b < nx; ++b) ex[b] = std::polar(1.0, (b + 0.5) * dx);
  std::vector<double> part(r.size(), 0.0);
  parallel_for(static_cast<int>(r.size()), [&](int i) {
    double acc = 0.0;
    for (int a = 0; a < ne; ++a) {
      const double eta = (a + 0.5) * de;
      const double r1 = r[i] * std::cos(eta), r2 = r[i] * std::sin(eta);
      double inner = 0.0;
      cplx z[2];
      for (int b = 0; b < nx; ++b) {
        z[0] = centre[0] + r1 * ex[b];
        for (int c = 0; c < nx; ++c) {
          z[1] = centre[1] + r2 * ex[c];
          inner += f(z);
        }
      }
      acc += inner * std::sin(eta) * std::cos(eta);
    }
    part[i] = acc * r[i] * r[i] * r[i] * dr[i] * de * dx * dx;
  });
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

double psh_l1_norm(const PshSample& s, int res) {
  const auto f = s.focus();
  return integrate_polydisc(s.n(), 2.0, f.data(), res, s.focus_scale(),
                            [&](const cplx* z) { return std::abs(s(z)); });
}

double layer_mass_in(const PshSample& s, const std::function<bool(const cplx*)>& inside, int res) {
  double m = 0.0;
  for (const auto& L : s.layers()) {
    if (L.radius == 0.0) {
      if (inside(L.centre.data())) m += L.mass;
      continue;
    }
    const NodeSet ns = sphere_nodes(s.n(), L.centre.data(), L.radius, res);
    m += L.mass * ns.sum([&](const double* x) { return inside(reinterpret_cast<const cplx*>(x)) ? 1.0 : 0.0; });
  }
  return m;
}

// ---- invariants ----------------------------------------------------------------------------

bool PshInvariantReport::ok() const {
  return submean_excess <= submean_tol && std::abs(pairing_measure - pairing_function) <= pairing_tol;
}

PshInvariantReport check_psh_invariants(const PshSample& s, int res, std::uint64_t seed) {
  const int n = s.n();
  PshInvariantReport rep;
  rep.submean_excess = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::normal_distribution<double> G;
  const auto poles = s.poles();
  const int m = 512;
  double worst = -std::numeric_limits<double>::infinity();
  for (int tries = 0; rep.circles < 24 && tries < 1000; ++tries) {
    std::vector<cplx> c(n), v(n);
    double nv = 0.0;
    for (int j = 0; j < n; ++j) {
      c[j] = 0.8 * cplx(U(rng), U(rng)) / std::sqrt(2.0 * n);
      v[j] = cplx(G(rng), G(rng));
      nv += std::norm(v[j]);
    }
    for (auto& x : v) x /= std::sqrt(nv);
    const double rho = 0.05 + 0.45 * (U(rng) + 1.0) / 2.0;
    std::vector<cplx> z(n);
    double avg = 0.0, big = 0.0, clearance = 1e300;
    for (int k = 0; k < m; ++k) {
      const cplx e = std::polar(rho, 2.0 * kPi * k / m);
      for (int j = 0; j < n; ++j) z[j] = c[j] + e * v[j];
      for (const auto& p : poles) clearance = std::min(clearance, std::sqrt(dist2(z.data(), p)));
      const double val = s(z.data());
      avg += val / m;
      big = std::max(big, std::abs(val));
    }
    if (clearance < 0.02) continue;
    ++rep.circles;
    const double excess = s(c.data()) - avg;
    const double tol = 1e-6 * (1.0 + big);
    if (excess - tol > worst) {
      worst = excess - tol;
      rep.submean_excess = excess;
      rep.submean_tol = tol;
    }
  }
  if (rep.circles == 0) fail(ErrorKind::Invariant, "psh", "no admissible test circle for " + s.family());

  // Green pairing against psi(z) = exp(1 - 1/(1 - |z - p|^2 / Rb^2))
  const auto p = s.focus();
  const double Rb = 0.5;
  auto psi_q = [&](const cplx* z) { return dist2(z, p) / (Rb * Rb); };
  auto psi = [&](const cplx* z) {
    const double q = psi_q(z);
    return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  auto lap_psi = [&](const cplx* z) {
    const double q = psi_q(z);
    if (q >= 1.0) return 0.0;
    const double f = std::exp(1.0 - 1.0 / (1.0 - q)), u = 1.0 - q;
    const double f1 = -f / (u * u), f2 = f * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
    return (4.0 * q * f2 + 2.0 * (2 * n) * f1) / (Rb * Rb);
  };
  const double scale = s.focus_scale();
  rep.pairing_measure =
      integrate_complex_ball(n, p.data(), Rb, res, scale, [&](const cplx* z) { return psi(z) * s.density(z); });
  for (const auto& L : s.layers()) {
    if (L.radius == 0.0) {
      rep.pairing_measure += L.mass * psi(L.centre.data());
    } else {
      const NodeSet ns = sphere_nodes(n, L.centre.data(), L.radius, res);
      rep.pairing_measure += L.mass * ns.sum([&](const double* x) { return psi(reinterpret_cast<const cplx*>(x)); });
    }
  }
  // tr(psi_{j kbar}) = Delta psi / 4
  rep.pairing_function = integrate_complex_ball(
      n, p.data(), Rb, res, scale, [&](const cplx* z) { return s(z) * trace_factor(n) * lap_psi(z) / 4.0; });
  // relative to the size of the integrand, since the function side may cancel to 0
  const double size = integrate_complex_ball(n, p.data(), Rb, res, scale, [&](const cplx* z) {
    return std::abs(s(z) * trace_factor(n) * lap_psi(z) / 4.0);
  });
  rep.pairing_tol = 2e-2 * (std::abs(rep.pairing_measure) + size) + 1e-12;
  return rep;
}

PshSample sample_psh(const std::string& family, int n, const std::vector<double>& params, std::uint64_t seed,
                     int res) {
  require(n == 1 || n == 2, "psh", "n must be 1 or 2");
  std::vector<PshTerm> terms;
  double constant = 0.0;
  auto param = [&](std::size_t i, double def) { return params.size() > i ? params[i] : def; };
  if (family == "const") {
    require(params.size() <= 1, "psh", "const takes one parameter");
    constant = -param(0, 1.0);
  } else if (family == "log") {
    terms.push_back({TermKind::Log, read_centre(n, params, 0, family), 0.0, 1.0});
  } else if (family == "trunc-log" || family == "smooth-log") {
    const double M = param(0, family == "trunc-log" ? 4.0 : 3.0);
    require(M > 0.0 && M <= 30.0, "psh", family + ": M must lie in (0, 30]");
    terms.push_back({family == "trunc-log" ? TermKind::TruncLog : TermKind::SmoothLog,
                     read_centre(n, params, 1, family), M, 1.0});
  } else if (family == "quad") {
    terms.push_back({TermKind::Quad, read_centre(n, params, 0, family), 0.0, 1.0});
  } else if (family == "sum") {
    require(params.size() <= 2, "psh", "sum takes [count, M]");
    const int count = static_cast<int>(param(0, 3.0));
    const double M = param(1, 3.0);
    require(count >= 1 && count <= 16, "psh", "sum: count must lie in 1..16");
    require(M > 0.0 && M <= 30.0, "psh", "sum: M must lie in (0, 30]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < count; ++k) {
      std::vector<cplx> c(n);
      do {
        for (auto& x : c) x = 0.6 * cplx(U(rng), U(rng));
      } while (dist2(c.data(), std::vector<cplx>(n, 0.0)) >= 0.36);
      const double w = 0.75 + 0.25 * U(rng);
      terms.push_back({TermKind::TruncLog, c, M, w});
    }
  } else {
    fail(ErrorKind::Input, "psh", "unknown psh family '" + family + "'");
  }
  PshSample s(n, std::move(terms), constant, family, params, seed);
  const auto inv = check_psh_invariants(s, res, seed ^ 0x9e3779b97f4a7c15ULL);
  if (inv.submean_excess > inv.submean_tol)
    fail(ErrorKind::Invariant, "psh", family + ": sub-mean-value violated by " + std::to_string(inv.submean_excess));
  if (std::abs(inv.pairing_measure - inv.pairing_function) > inv.pairing_tol)
    fail(ErrorKind::Invariant, "psh",
         family + ": Green pairing mismatch " + std::to_string(inv.pairing_measure) + " vs " +
             std::to_string(inv.pairing_function));
  s.set_l1(psh_l1_norm(s, res));
  return s;
}

std::vector<PshFamilySpec> builtin_psh_families(int n) {
  std::vector<double> off(2 * n, 0.0);
  off[1] = 0.5;
  std::vector<double> toff{4.0};
  toff.insert(toff.end(), off.begin(), off.end());
  return {
      {"const", "const", {1.0}},
      {"log", "log", {}},
      {"trunc-log", "trunc-log", {4.0}},
      {"trunc-log-off", "trunc-log", toff},
      {"smooth-log", "smooth-log", {3.0}},
      {"quad", "quad", {}},
      {"sum", "sum", {3.0, 3.0}},
  };
}

// ---- closed forms --------------------------------------------------------------------------

double trunc_log_ball_l1(int n, double M, double r) {
  require(r > 0.0 && r <= 1.0, "psh", "closed form needs 0 < r <= 1");
  const double R = std::isfinite(M) ? std::exp(-M) : 0.0;
  if (n == 1) {
    if (r <= R) return kPi * r * r * M;
    const double inner = R > 0.0 ? kPi * R * R * M - kPi * R * R * (M + 0.5) : 0.0;
    return inner + kPi * r * r * (0.5 - std::log(r));
  }
  require(n == 2, "psh", "closed form for n in {1, 2}");
  if (r <= R) return 0.5 * kPi * kPi * r * r * r * r * M;
  const double r4 = r * r * r * r, R4 = R * R * R * R;
  return 2.0 * kPi * kPi * (-r4 * std::log(r) / 4.0 + r4 / 16.0 - R4 / 16.0);
}

double trunc_log_disc2_l1(double M) {
  const double R = std::exp(-M);
  return kPi / 2.0 - kPi * R * R / 2.0 + 2.0 * kPi * (2.0 * std::log(2.0) - 0.75);
}

double log_rect_integral(double a, double b) {
  const double G = a * b * std::log(a * a + b * b) - 3.0 * a * b + a * a * std::atan(b / a) + b * b * std::atan(a / b);
  return 2.0 * G;
}

double trunc_log_strip_l1(double M, double eps) {
  const double R = std::exp(-M);
  require(R <= eps && eps <= 1.0, "psh", "strip closed form needs e^-M <= eps <= 1");
  // part of the rectangle outside the unit circle, where log|z| > 0
  std::vector<double> x, w;
  gauss_legendre(24, x, w);
  double pos = 0.0;
  for (int i = 0; i < 24; ++i) {
    const double y = 0.5 * eps * (x[i] + 1.0);
    const double a = std::sqrt(1.0 - y * y);
    double inner = 0.0;
    for (int k = 0; k < 24; ++k) {
      const double xx = a + 0.5 * (1.0 - a) * (x[k] + 1.0);
      inner += w[k] * 0.5 * std::log(xx * xx + y * y);
    }
    pos += w[i] * 0.5 * (1.0 - a) * inner;
  }
  pos *= 0.5 * eps * 4.0;
  return -log_rect_integral(1.0, eps) + 2.0 * pos - kPi * R * R / 2.0;
}

double trunc_log_strip_mass(double M, double eps) {
  const double R = std::exp(-M);
  if (R <= eps) return 1.0;
  return 2.0 / kPi * std::asin(eps / R);
}

// ---- surrogate -----------------------------------------------------------------------------

double surrogate_g(double t) { return std::abs(t) * std::log(std::abs(t) + 2.0); }

double surrogate_g1(double t) {
  const double a = std::abs(t);
  const double v = 1.0 - 2.0 / (2.0 + a) + std::log(2.0 + a);
  return t < 0.0 ? -v : v;
}

double surrogate_g2(double t) {
  const double a = std::abs(t);
  return 2.0 / ((2.0 + a) * (2.0 + a)) + 1.0 / (2.0 + a);
}

ConvexSurrogate::ConvexSurrogate(int k) : k_(k) {
  require(k >= 3, "psh", "surrogate index must be >= 3");
  const double e = 1.0 / k;
  q1_ = surrogate_g2(e);
  q0_ = 2.0 * k * surrogate_g1(e) - q1_;
  c_ = surrogate_g(e) - (q0_ * e * e / 2.0 + (q1_ - q0_) * k * e * e * e / 6.0);
}

double ConvexSurrogate::q(double t) const {
  const double a = std::abs(t);
  if (a >= 1.0 / k_) return surrogate_g2(t);
  return q0_ + (q1_ - q0_) * k_ * a;
}

double ConvexSurrogate::value(double t) const {
  const double a = std::abs(t);
  if (a >= 1.0 / k_) return surrogate_g(t);
  return c_ + q0_ * a * a / 2.0 + (q1_ - q0_) * k_ * a * a * a / 6.0;
}

double ConvexSurrogate::d1(double t) const {
  const double a = std::abs(t);
  if (a >= 1.0 / k_) return surrogate_g1(t);
  const double v = q0_ * a + (q1_ - q0_) * k_ * a * a / 2.0;
  return t < 0.0 ? -v : v;
}

double ConvexSurrogate::min_q() const {
  double m = 1e300;
  for (int i = 0; i <= 20000; ++i) m = std::min(m, q(-1.0 + i * 1e-4));
  return m;
}

double ConvexSurrogate::sup_gap() const {
  double m = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double t = -1.0 + i * 1e-4;
    m = std::max(m, std::abs(value(t) - surrogate_g(t)));
  }
  return m;
}

ConvexSurrogate build_surrogate(int k) { return ConvexSurrogate(k); }

}  // namespace crd
