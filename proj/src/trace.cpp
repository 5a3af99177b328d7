#include "crdisc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "crdisc/errors.hpp"
#include "crdisc/family.hpp"
#include "crdisc/interp.hpp"
#include "crdisc/parallel.hpp"
#include "crdisc/psh.hpp"
#include "crdisc/psh_verify.hpp"

namespace crd {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// 1 on [0, R/2], 0 beyond R, smooth in between
double partition(double s, double R) {
  if (s <= 0.5 * R) return 1.0;
  if (s >= R) return 0.0;
  const double u = (s - 0.5 * R) / (0.5 * R);
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return b / (a + b);
}

double green_kernel(cplx z, cplx eta) { return std::log(std::abs(z - eta)) - std::log(std::abs(1.0 - z * std::conj(eta))); }

std::vector<cplx> interior_test_points() {
  std::vector<cplx> pts{0.0};
  for (double r : {0.2, 0.4, 0.6, 0.8, 0.9})
    for (int k = 0; k < 12; ++k) pts.push_back(std::polar(r, 0.3 + 2.0 * kPi * k / 12));
  return pts;
}

}  // namespace

DiscRule DiscRule::band(double r0, int nr, int nth) {
  require(r0 >= 0.0 && r0 < 1.0 && nr >= 1 && nth >= 4, "trace", "bad disc rule");
  DiscRule d;
  d.nr = nr;
  d.nth = nth;
  const double dr = (1.0 - r0) / nr, dth = 2.0 * kPi / nth;
  for (int i = 0; i < nr; ++i) {
    const double r = r0 + (i + 0.5) * dr;
    for (int k = 0; k < nth; ++k) {
      d.z.push_back(std::polar(r, (k + 0.5) * dth));
      d.w.push_back(r * dr * dth);
    }
  }
  return d;
}

DiscRule DiscRule::make(int nr, int nth) { return band(0.0, nr, nth); }

double TraceCandidate::boundary_integral() const {
  double s = 0.0;
  for (double x : boundary) s += x;
  return 2.0 * kPi * s / static_cast<double>(boundary.size());
}

double TraceCandidate::l1() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += rule.w[i] * std::abs(values[i]);
  return s;
}

double TraceCandidate::weighted_mass(double beta0) const {
  double s = 0.0;
  for (std::size_t i = 0; i < major.size(); ++i) s += rule.w[i] * std::pow(1.0 - std::abs(rule.z[i]), beta0) * major[i];
  return s;
}

double TraceCandidate::annulus(double eps) const {
  require(eps > 0.0, "trace", "annulus width must be positive");
  const DiscRule b = DiscRule::band(std::max(0.0, 1.0 - 2.0 * eps), 16, 8 * res);
  std::vector<double> part(b.z.size());
  parallel_for(static_cast<int>(b.z.size()), [&](int i) {
    const double m = ddc_major ? ddc_major(b.z[i]) : std::abs(ddc(b.z[i]));
    part[i] = b.w[i] * (1.0 - std::abs(b.z[i])) * m;
  });
  double s = 0.0;
  for (double x : part) s += x;
  return s;
}

CurrentOnDisc TraceCandidate::current(int n) const { return CurrentOnDisc::density(ddc, n); }

TraceCandidate make_candidate(const std::string& name, std::function<double(cplx)> v, std::function<double(cplx)> ddc,
                              int res, const CandidateOptions& opt) {
  require(res >= 2, "trace", "candidate resolution too small");
  TraceCandidate c;
  c.name = name;
  c.v = std::move(v);
  c.ddc = std::move(ddc);
  c.ddc_major = opt.ddc_major;
  c.ddc_positive = opt.ddc_positive;
  c.res = res;
  c.rule = DiscRule::make(4 * res, 8 * res);
  const int N = static_cast<int>(c.rule.z.size());
  c.values.resize(N);
  c.density.resize(N);
  c.major.resize(N);
  parallel_for(N, [&](int i) {
    const cplx z = c.rule.z[i];
    c.values[i] = c.v(z);
    c.density[i] = c.ddc(z);
    c.major[i] = c.ddc_major ? c.ddc_major(z) : std::abs(c.density[i]);
  });
  const int M = c.boundary_grid();
  c.boundary.resize(M);
  for (int k = 0; k < M; ++k) c.boundary[k] = c.v(std::polar(1.0, 2.0 * kPi * k / M));

  double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
  for (double x : c.values) {
    vmax = std::max(vmax, std::abs(x));
    vmin = std::min(vmin, x);
  }
  for (double x : c.boundary) {
    vmax = std::max(vmax, std::abs(x));
    vmin = std::min(vmin, x);
  }
  if (opt.nonnegative && vmin < -1e-12 * (1.0 + vmax))
    fail(ErrorKind::Invariant, "trace", "candidate " + name + " is negative somewhere (" + fmt_g(vmin) + ")");

  // five-point Laplacian against the stated density on interior nodes
  const double h = 1e-3;
  double dmax = 0.0;
  for (const cplx z : interior_test_points()) {
    const double lap = (c.v(z + h) + c.v(z - h) + c.v(z + cplx(0, h)) + c.v(z - cplx(0, h)) - 4.0 * c.v(z)) / (h * h);
    c.fd_residual = std::max(c.fd_residual, std::abs(lap / (2.0 * kPi) - c.ddc(z)));
    dmax = std::max(dmax, std::abs(c.ddc(z)));
  }
  c.fd_tol = 1e-3 * (1.0 + dmax);
  if (c.fd_residual > c.fd_tol)
    fail(ErrorKind::Invariant, "trace",
         "dd^c of candidate " + name + " disagrees with the finite-difference Laplacian (" + fmt_g(c.fd_residual) + ")");
  if (c.ddc_positive)
    for (double x : c.density)
      if (x < 0.0) fail(ErrorKind::Invariant, "trace", "candidate " + name + " claims a positive dd^c");
  return c;
}

TraceCandidate resample(const TraceCandidate& c, int res) {
  CandidateOptions opt;
  opt.nonnegative = false;
  opt.ddc_positive = c.ddc_positive;
  opt.ddc_major = c.ddc_major;
  return make_candidate(c.name, c.v, c.ddc, res, opt);
}

double green_potential(const DiscRule& rule, const std::vector<double>& rho_on_rule,
                       const std::function<double(cplx)>& rho, cplx z) {
  const double R = 4.0 / rule.nr;
  double outer = 0.0;
  for (std::size_t i = 0; i < rule.z.size(); ++i) {
    if (rho_on_rule[i] == 0.0) continue;
    const double s = std::abs(rule.z[i] - z);
    const double cut = 1.0 - partition(s, R);
    if (cut == 0.0) continue;
    outer += rule.w[i] * cut * rho_on_rule[i] * green_kernel(z, rule.z[i]);
  }
  // local polar rule about z carries the log singularity
  const int ns = 32, nphi = 32;
  const double ds = R / ns, dphi = 2.0 * kPi / nphi;
  double inner = 0.0;
  for (int a = 0; a < ns; ++a) {
    const double s = (a + 0.5) * ds;
    const double chi = partition(s, R);
    if (chi == 0.0) continue;
    for (int b = 0; b < nphi; ++b) {
      const cplx eta = z + std::polar(s, (b + 0.5) * dphi);
      if (std::abs(eta) >= 1.0) continue;
      const double r = rho(eta);
      if (r == 0.0) continue;
      inner += s * ds * dphi * chi * r * green_kernel(z, eta);
    }
  }
  return outer + inner;
}

RieszReport riesz_decompose(const TraceCandidate& c, const TraceCandidate* refined) {
  RieszReport rep;
  rep.name = c.name;
  require(!refined || refined->res == 2 * c.res, "trace", "refined candidate must have twice the resolution");
  const TraceCandidate own = refined ? TraceCandidate{} : resample(c, 2 * c.res);
  const TraceCandidate& fine = refined ? *refined : own;
  const int M = fine.boundary_grid();
  const HarmonicField H = poisson_extend(analyze(fine.boundary, M / 2 - 1));
  const auto pts = interior_test_points();
  rep.points = static_cast<int>(pts.size());
  std::vector<double> ec(pts.size()), ef(pts.size()), dg(pts.size()), vmax(pts.size());
  parallel_for(rep.points, [&](int i) {
    const cplx z = pts[i];
    const double v = c.v(z), h = H(z);
    const double gc = green_potential(c.rule, c.density, c.ddc, z);
    const double gf = green_potential(fine.rule, fine.density, fine.ddc, z);
    ec[i] = std::abs(v - h - gc);
    ef[i] = std::abs(v - h - gf);
    dg[i] = std::abs(gc - gf);
    vmax[i] = std::abs(v);
    if (i == 0) {
      rep.green_at_0 = gf;
      rep.harmonic_at_0 = h;
    }
  });
  rep.error = *std::max_element(ec.begin(), ec.end());
  rep.error_refined = *std::max_element(ef.begin(), ef.end());
  const double scale = 1.0 + *std::max_element(vmax.begin(), vmax.end());
  rep.quad_tol = std::max(*std::max_element(dg.begin(), dg.end()) + H.truncation_error(), 1e-12 * scale);
  rep.pass = rep.error <= 10.0 * rep.quad_tol && rep.error_refined <= 10.0 * rep.quad_tol;
  return rep;
}

double green_average_closed(cplx eta) {
  const double R = 0.5, s = std::abs(eta);
  // the log|1 - z conj(eta)| part averages to its value at z = 0, which is 0
  if (s <= R) return kPi * R * R * std::log(R) - kPi * (R * R - s * s) / 2.0;
  return kPi * R * R * std::log(s);
}

GreenRegularity green_kernel_regularity(int res) {
  GreenRegularity g;
  const DiscRule rule = DiscRule::make(4 * res, 8 * res);
  auto ind = [](cplx z) { return std::abs(z) < 0.5 ? 1.0 : 0.0; };
  std::vector<double> rho(rule.z.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = ind(rule.z[i]);
  std::vector<cplx> pts;
  for (double r : {0.0, 0.25, 0.45, 0.55, 0.75, 0.95, 1.0})
    for (int k = 0; k < (r == 0.0 ? 1 : 8); ++k) pts.push_back(std::polar(r, 0.2 + 2.0 * kPi * k / 8));
  std::vector<double> fq(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) { fq[i] = green_potential(rule, rho, ind, pts[i]); });
  g.f0 = fq[0];
  g.f0_closed = green_average_closed(0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(std::abs(pts[i]) - 1.0) < 1e-12) g.boundary_max = std::max(g.boundary_max, std::abs(fq[i]));
    g.max_rel_err = std::max(g.max_rel_err, std::abs(fq[i] - green_average_closed(pts[i])) / std::abs(g.f0_closed));
  }
  auto norm_at = [&](double h, double t) {
    const int n = static_cast<int>(std::lround(2.0 / h)) + 1;
    GridFunction f = GridFunction::sample([](double x, double y) { return green_average_closed(cplx(x, y)); }, -1.0,
                                          -1.0, h, n, n);
    std::vector<char> mask(f.v.size());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(j) * n + i] = std::hypot(f.x(i), f.y(j)) <= 1.0 + 1e-12;
    return holder_norm_grid(f, t, &mask);
  };
  g.pass = g.boundary_max <= 1e-10 * std::abs(g.f0_closed) && g.max_rel_err <= 2e-3;
  for (double a : {0.25, 0.5, 0.75}) {
    const double h = 1.0 / (4 * res);
    const double nc = norm_at(h, 1.0 + a), nf = norm_at(h / 2, 1.0 + a);
    g.alpha.push_back(a);
    g.norm.push_back(nc);
    g.norm_refined.push_back(nf);
    const double ch = std::abs(nf - nc) / std::max(nc, nf);
    g.change.push_back(ch);
    if (!(std::isfinite(nc) && std::isfinite(nf) && ch <= 0.1)) g.pass = false;
  }
  return g;
}

Lemma53Row boundary_l1_bound(const TraceCandidate& c, double beta, const Dictionary& d, int current_grid) {
  require(beta > 1.0 && beta < 2.0, "trace", "beta must lie in (1, 2)");
  Lemma53Row r;
  r.name = c.name;
  r.boundary = c.boundary_integral();
  r.neg_norm = neg_holder_norm(c.current(current_grid), beta, d).value;
  double s = 0.0;
  for (std::size_t i = 0; i < c.values.size(); ++i) s += c.rule.w[i] * c.values[i];
  r.integral = s;
  const double den = r.neg_norm + r.integral;
  if (den <= 0.0) fail(ErrorKind::Numerical, "trace", "zero denominator for candidate " + c.name);
  r.ratio = r.boundary / den;
  return r;
}

CutoffEstimate cutoff_c2_estimate(const TraceCandidate& c, double eps, const Dictionary* d, int current_grid) {
  require(eps > 0.0 && eps < 1.0, "trace", "eps must lie in (0, 1)");
  CutoffEstimate e;
  e.eps = eps;
  e.l1_term = c.l1() / (eps * eps);
  e.annulus_term = c.annulus(eps);
  e.bound = e.l1_term + e.annulus_term;
  if (d) e.neg_norm = neg_holder_norm(c.current(current_grid), 2.0, *d).value;
  return e;
}

double trace_gamma(double beta0, double beta) {
  require(beta0 > 0.0 && beta0 < 1.0, "trace", "beta0 must lie in (0, 1)");
  require(beta > 1.0 && beta < 2.0, "trace", "beta must lie in (1, 2)");
  return (2.0 - beta) / (2.0 - beta0);
}

TraceBound interpolated_bound(double lhs, double l1, double n0, double annulus, double beta0, double beta,
                              double eps) {
  require(eps > 0.0 && eps < 1.0, "trace", "eps must lie in (0, 1)");
  TraceBound b;
  b.gamma = trace_gamma(beta0, beta);
  b.lhs = lhs;
  b.l1 = l1;
  b.n0 = n0;
  b.annulus = annulus;
  const double g = b.gamma;
  b.terms[0] = b.l1;
  b.terms[1] = std::pow(eps, -2.0 * (1.0 - g)) * std::pow(b.n0, g) * std::pow(b.l1, 1.0 - g);
  b.terms[2] = std::pow(b.n0, g) * std::pow(b.annulus, 1.0 - g);
  b.rhs = b.terms[0] + b.terms[1] + b.terms[2];
  b.ratio = b.rhs > 0.0 ? b.lhs / b.rhs : (b.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return b;
}

TraceBound trace_interpolated_bound(const TraceCandidate& c, double beta0, double beta, double eps) {
  require(eps > 0.0 && eps < 1.0, "trace", "eps must lie in (0, 1)");
  return interpolated_bound(c.boundary_integral(), c.l1(), c.weighted_mass(beta0), c.annulus(eps), beta0, beta, eps);
}

// ---- candidate families ----------------------------------------------------------------------

std::vector<TraceCandidate> builtin_trace_candidates(int res, std::uint64_t seed) {
  std::vector<TraceCandidate> out;
  CandidateOptions pos;
  pos.ddc_positive = true;
  out.push_back(make_candidate("one", [](cplx) { return 1.0; }, [](cplx) { return 0.0; }, res, pos));
  out.push_back(make_candidate(
      "harmonic", [](cplx z) { return 1.0 + 0.5 * z.real() + 0.25 * (z * z).real(); }, [](cplx) { return 0.0; }, res,
      pos));
  out.push_back(make_candidate("cap", [](cplx z) { return 1.0 - std::norm(z); }, [](cplx) { return -2.0 / kPi; }, res));
  out.push_back(
      make_candidate("bowl", [](cplx z) { return std::norm(z) + 0.1; }, [](cplx) { return 2.0 / kPi; }, res, pos));
  struct Bump {
    cplx c;
    double s, a;
  };
  for (int k = 0; k < 4; ++k) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(k));
    std::vector<Bump> bumps;
    for (int j = 0; j < 3; ++j) {
      const double r = 0.95 * std::sqrt(unit(rng)), th = 2.0 * kPi * unit(rng);
      const double s = 0.2 + 0.25 * unit(rng), a = 0.5 + unit(rng);
      bumps.push_back({std::polar(r, th), s, a});
    }
    auto v = [bumps](cplx z) {
      double t = 0.0;
      for (const auto& b : bumps) t += b.a * std::exp(-std::norm(z - b.c) / (b.s * b.s));
      return t;
    };
    auto ddc = [bumps](cplx z) {
      double t = 0.0;
      for (const auto& b : bumps) {
        const double q = std::norm(z - b.c), s2 = b.s * b.s;
        t += b.a * std::exp(-q / s2) * (4.0 * q / (s2 * s2) - 4.0 / s2);
      }
      return t / (2.0 * kPi);
    };
    out.push_back(make_candidate("bumps-" + std::to_string(k), v, ddc, res));
  }
  return out;
}

TraceCandidate pullback_candidate(const std::string& name, const PshSample& phi1, const PshSample& phi2,
                                  std::shared_ptr<const DiscFamily> fam, int member, int res) {
  require(member >= 0 && member < static_cast<int>(fam->members().size()), "trace", "member index out of range");
  const int d = fam->dim();
  require(phi1.n() == d && phi2.n() == d, "trace", "psh pair must live in C^d");
  auto eval = [fam, member, d](cplx z, cplx* F, cplx* dF) {
    const DiscMember& m = fam->members()[member];
    fam->eval(m, z, F);
    if (dF) {
      cplx dy[2];
      fam->gradient(m, z, dF, dy);
    }
    (void)d;
  };
  auto pulled = [d](const PshSample& p, const cplx* F, const cplx* dF) {
    cplx H[4];
    p.hessian(F, H);
    double s = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) s += (H[a * d + b] * dF[a] * std::conj(dF[b])).real();
    return 2.0 / kPi * s;
  };
  auto v = [eval, phi1, phi2](cplx z) {
    cplx F[2];
    eval(z, F, nullptr);
    return phi1(F) - phi2(F);
  };
  auto ddc = [eval, pulled, phi1, phi2](cplx z) {
    cplx F[2], dF[2];
    eval(z, F, dF);
    return pulled(phi1, F, dF) - pulled(phi2, F, dF);
  };
  CandidateOptions opt;
  opt.ddc_major = [eval, pulled, phi1, phi2](cplx z) {
    cplx F[2], dF[2];
    eval(z, F, dF);
    return pulled(phi1, F, dF) + pulled(phi2, F, dF);
  };
  return make_candidate(name, v, ddc, res, opt);
}

std::vector<TraceCandidate> pullback_trace_candidates(int res) {
  std::vector<TraceCandidate> out;
  for (int d = 1; d <= 2; ++d) {
    const auto fam = reference_family(d);
    std::vector<double> off(2 * d, 0.0);
    off[0] = 0.1;
    off[1] = 0.15;
    std::vector<double> near1{2.0}, near2{3.0}, far1{2.0}, far2{3.0};
    far1.insert(far1.end(), off.begin(), off.end());
    far2.insert(far2.end(), off.begin(), off.end());
    const PshSample a1 = sample_psh("smooth-log", d, near1, 1), a2 = sample_psh("smooth-log", d, near2, 1);
    const PshSample b1 = sample_psh("smooth-log", d, far1, 1), b2 = sample_psh("smooth-log", d, far2, 1);
    const int members = static_cast<int>(fam->members().size());
    for (int q = 0; q < members; ++q) {
      const std::string tag = "d" + std::to_string(d) + "-m" + std::to_string(q);
      out.push_back(pullback_candidate("smooth-log-" + tag, a1, a2, fam, q, res));
      out.push_back(pullback_candidate("smooth-log-off-" + tag, b1, b2, fam, q, res));
    }
  }
  return out;
}

// ---- suites ----------------------------------------------------------------------------------

namespace {

void add(TraceSuiteReport& r, std::string name, double value, double threshold, bool pass, std::string note = {}) {
  r.checks.push_back({std::move(name), value, threshold, pass, std::move(note)});
}

void finish(TraceSuiteReport& r) {
  r.pass = !r.checks.empty();
  for (const auto& c : r.checks)
    if (!c.pass) r.pass = false;
}

std::vector<double> eps_set(int count, bool refined) {
  std::vector<double> e;
  for (int k = 1; k <= count; ++k) {
    e.push_back(std::ldexp(1.0, -k));
    if (refined && k < count) e.push_back(std::ldexp(1.0, -k) * std::sqrt(0.5));
  }
  return e;
}

double rel_change(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

void add_riesz(TraceSuiteReport& rep, const std::vector<TraceCandidate>& cs,
               const std::vector<TraceCandidate>* refined = nullptr) {
  std::vector<RieszReport> rr(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) rr[i] = riesz_decompose(cs[i], refined ? &(*refined)[i] : nullptr);
  for (const auto& r : rr)
    add(rep, "riesz " + r.name, r.error_refined, 10.0 * r.quad_tol, r.pass,
        "coarse error " + fmt_g(r.error) + ", tolerance " + fmt_g(r.quad_tol));
}

}  // namespace

TraceSuiteReport verify_lemma53(const TraceOptions& opt) {
  TraceSuiteReport rep;
  rep.id = "lemma53";
  const auto cs = builtin_trace_candidates(opt.res, opt.seed);

  add_riesz(rep, cs);
  CandidateOptions signed_opt;
  signed_opt.nonnegative = false;
  const TraceCandidate well = make_candidate(
      "well", [](cplx z) { return std::norm(z) - 1.0; }, [](cplx) { return 2.0 / kPi; }, opt.res, signed_opt);
  const RieszReport rw = riesz_decompose(well);
  add(rep, "riesz well", rw.error_refined, 10.0 * rw.quad_tol, rw.pass);
  add(rep, "riesz well green(0)", rw.green_at_0, -1.0, std::abs(rw.green_at_0 + 1.0) <= 10.0 * rw.quad_tol,
      "harmonic(0) " + fmt_g(rw.harmonic_at_0));

  const GreenRegularity g = green_kernel_regularity(opt.res);
  add(rep, "green-average boundary", g.boundary_max, 1e-10 * std::abs(g.f0_closed),
      g.boundary_max <= 1e-10 * std::abs(g.f0_closed));
  add(rep, "green-average closed form", g.max_rel_err, 2e-3, g.max_rel_err <= 2e-3,
      "f(0) " + fmt_g(g.f0) + " against " + fmt_g(g.f0_closed));
  for (std::size_t i = 0; i < g.alpha.size(); ++i)
    add(rep, "green-average holder " + fmt_g(1.0 + g.alpha[i]), g.change[i], 0.1, g.change[i] <= 0.1,
        "norm " + fmt_g(g.norm[i]) + " refined " + fmt_g(g.norm_refined[i]));

  const Dictionary d0 = Dictionary::build(opt.dictionary_level), d1 = Dictionary::build(opt.dictionary_level + 1);
  std::vector<Lemma53Row> r0(cs.size()), r1(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    r0[i] = boundary_l1_bound(cs[i], opt.beta, d0, opt.current_grid);
    r1[i] = boundary_l1_bound(cs[i], opt.beta, d1, opt.current_grid);
  }
  double sup0 = 0.0, sup1 = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    sup0 = std::max(sup0, r0[i].ratio);
    sup1 = std::max(sup1, r1[i].ratio);
    if (cs[i].name == "one") add(rep, "lemma53 one", r0[i].ratio, 2.0, std::abs(r0[i].ratio - 2.0) <= 1e-12);
    if (cs[i].name == "cap") add(rep, "lemma53 cap", r0[i].ratio, 0.0, std::abs(r0[i].ratio) <= 1e-12);
  }
  const double ch = rel_change(sup0, sup1);
  add(rep, "lemma53 family", ch, 0.1, std::isfinite(sup0) && std::isfinite(sup1) && ch <= 0.1,
      "sup " + fmt_g(sup0) + " enriched " + fmt_g(sup1));

  // both sides are homogeneous of degree 1
  const TraceCandidate& b = cs.back();
  const TraceCandidate b2 = make_candidate(
      b.name + "-x2", [&b](cplx z) { return 2.0 * b.v(z); }, [&b](cplx z) { return 2.0 * b.ddc(z); }, opt.res);
  const double s1 = boundary_l1_bound(b, opt.beta, d0, opt.current_grid).ratio;
  const double s2 = boundary_l1_bound(b2, opt.beta, d0, opt.current_grid).ratio;
  add(rep, "lemma53 scaling", rel_change(s1, s2), 1e-12, rel_change(s1, s2) <= 1e-12);

  // cutoff estimate: constant of the C^{-2} dictionary estimate against the two-term bound
  const CutoffEstimate one = cutoff_c2_estimate(cs.front(), 0.25);
  add(rep, "cutoff one", one.bound, 16.0 * kPi, rel_change(one.bound, 16.0 * kPi) <= 1e-12);
  double c0 = 0.0, c1 = 0.0;
  for (const auto& c : cs)
    for (double e : eps_set(opt.eps_count, false)) {
      const CutoffEstimate e0 = cutoff_c2_estimate(c, e, &d0, opt.current_grid);
      const CutoffEstimate e1 = cutoff_c2_estimate(c, e, &d1, opt.current_grid);
      c0 = std::max(c0, e0.neg_norm / e0.bound);
      c1 = std::max(c1, e1.neg_norm / e1.bound);
    }
  const double cc = rel_change(c0, c1);
  add(rep, "cutoff family constant", cc, 0.1, std::isfinite(c0) && cc <= 0.1,
      "sup " + fmt_g(c0) + " enriched " + fmt_g(c1));
  finish(rep);
  return rep;
}

TraceSuiteReport verify_prop54(const TraceOptions& opt) {
  TraceSuiteReport rep;
  rep.id = "prop54";
  const double g = trace_gamma(opt.beta0, opt.beta);
  add(rep, "gamma", g, (2.0 - opt.beta) / (2.0 - opt.beta0), true);

  const auto base = builtin_trace_candidates(opt.res, opt.seed);
  const TraceBound b1 = trace_interpolated_bound(base.front(), opt.beta0, opt.beta, 0.25);
  add(rep, "prop54 one", b1.rhs, kPi, b1.terms[1] == 0.0 && b1.terms[2] == 0.0 && rel_change(b1.rhs, kPi) <= 1e-12,
      "ratio " + fmt_g(b1.ratio));

  const auto cs = pullback_trace_candidates(opt.res);
  const auto cs_fine = pullback_trace_candidates(2 * opt.res);
  add_riesz(rep, cs, &cs_fine);

  double sup0 = 0.0, sup1 = 0.0;
  std::string arg;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (double e : eps_set(opt.eps_count, false)) {
      const double r = trace_interpolated_bound(cs[i], opt.beta0, opt.beta, e).ratio;
      if (r > sup0) {
        sup0 = r;
        arg = cs[i].name + " eps " + fmt_g(e);
      }
    }
    for (double e : eps_set(opt.eps_count, true))
      sup1 = std::max(sup1, trace_interpolated_bound(cs_fine[i], opt.beta0, opt.beta, e).ratio);
  }
  const double ch = rel_change(sup0, sup1);
  add(rep, "prop54 pullbacks", ch, 0.1, std::isfinite(sup0) && std::isfinite(sup1) && ch <= 0.1,
      "sup " + fmt_g(sup0) + " at " + arg + ", refined " + fmt_g(sup1));

  // the weighted mass dominates every dictionary estimate of a positive current
  const Dictionary d = Dictionary::build(opt.dictionary_level);
  double worst = 0.0;
  std::string wname;
  auto sandwich = [&](const std::string& name, const CurrentOnDisc& T) {
    double w = 0.0;
    const double area = T.cell() * T.cell();
    for (int j = 0; j < T.n(); ++j)
      for (int i = 0; i < T.n(); ++i)
        if (T.inside(i, j)) w += std::pow(1.0 - std::abs(T.centre(i, j)), opt.beta0) * T.rho(i, j) * area;
    const double r = neg_holder_norm(T, opt.beta0, d).value / w;
    if (r > worst) {
      worst = r;
      wname = name;
    }
  };
  for (const auto& c : base)
    if (c.ddc_positive && c.name == "bowl") sandwich(c.name, c.current(opt.current_grid));
  for (const auto& c : cs) {
    // each half of the pair is a positive pullback
    sandwich(c.name + " major", CurrentOnDisc::density(c.ddc_major, opt.current_grid));
  }
  add(rep, "sandwich", worst, 1.0, worst <= 1.0, "largest at " + wname);
  finish(rep);
  return rep;
}

}  // namespace crd
