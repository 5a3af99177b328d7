#include "crdisc/psh_verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <tuple>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/parallel.hpp"
#include "crdisc/seed.hpp"

namespace crd {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double norm_of(const double* x, int n) {
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += x[j] * x[j];
  return std::sqrt(s);
}

// real part of the focus, or the origin when it is not well inside a ball of radius r
std::vector<double> foot(const PshSample& s, double r) {
  std::vector<double> x(s.n(), 0.0);
  const auto f = s.focus();
  for (int j = 0; j < s.n(); ++j) x[j] = f[j].real();
  if (norm_of(x.data(), s.n()) >= 0.9 * r) std::fill(x.begin(), x.end(), 0.0);
  return x;
}

bool in_graph_domain(const cplx* z, int n) {
  double r2 = 0.0;
  for (int j = 0; j < n; ++j) r2 += z[j].real() * z[j].real();
  return r2 <= 1.0;
}

double min_eig_hermitian(int n, const cplx* M) {
  if (n == 1) return M[0].real();
  const double a = M[0].real(), d = M[3].real();
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(M[1]));
}

double ball_volume_c(int n, double r) { return n == 1 ? kPi * r * r : kPi * kPi * r * r * r * r / 2.0; }

// log-log fit over the positive points, if there are at least two
bool positive_fit(const std::vector<double>& x, const std::vector<double>& y, SlopeFit& fit) {
  int pos = 0;
  for (std::size_t i = 0; i < x.size(); ++i) pos += x[i] > 0.0 && y[i] > 1e-300;
  if (pos < 2) return false;
  fit = fit_loglog(x, y);
  return true;
}

Series named(const std::string& name) {
  Series s;
  s.name = name;
  return s;
}

LemmaReport start(const std::string& lemma, const PshSample& s) {
  LemmaReport r;
  r.lemma = lemma;
  r.family = s.family();
  r.n = s.n();
  return r;
}

void finish_margin_series(Series& s, double tol) {
  auto lo = [](const std::vector<RatioRow>& rows) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.ratio);
    return m;
  };
  s.sup = lo(s.rows);
  s.sup_refined = lo(s.refined);
  s.change = std::abs(s.sup_refined - s.sup);
  s.pass = std::isfinite(s.sup) && std::isfinite(s.sup_refined) && s.sup >= -tol && s.sup_refined >= -tol;
}

}  // namespace

const Series* LemmaReport::find(const std::string& name) const {
  for (const auto& s : series)
    if (s.name == name) return &s;
  return nullptr;
}

void finish_ratio_series(Series& s, double floor) {
  auto hi = [](const std::vector<RatioRow>& rows) {
    double m = 0.0;
    for (const auto& r : rows) {
      if (!std::isfinite(r.ratio)) return std::numeric_limits<double>::infinity();
      m = std::max(m, r.ratio);
    }
    return m;
  };
  s.sup = hi(s.rows);
  s.sup_refined = hi(s.refined);
  const double big = std::max(std::abs(s.sup), std::abs(s.sup_refined));
  s.change = big > 0.0 ? std::abs(s.sup_refined - s.sup) / big : 0.0;
  if (!std::isfinite(big)) {
    s.pass = false;
    s.note = "unbounded";
  } else if (big <= floor) {
    s.pass = true;
    s.note = "vacuous (zero)";
  } else {
    s.pass = s.change <= 0.1;
  }
}

void finish_report(LemmaReport& r) {
  r.pass = true;
  for (const auto& s : r.series)
    if (s.gating && !s.pass) r.pass = false;
  if (r.has_slope && !(r.slope >= r.slope_threshold)) r.pass = false;
}

std::vector<double> dyadic_set(double top, int count, bool refined) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(std::ldexp(top, -k));
    if (refined && k + 1 < count) out.push_back(std::ldexp(top, -k) / std::sqrt(2.0));
  }
  return out;
}

double surrogate_g_inverse(double v) {
  require(v >= 0.0, "psh", "g is inverted on [0, inf)");
  double lo = 0.0, hi = std::max(1.0, v);
  while (surrogate_g(hi) < v) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (surrogate_g(mid) < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- log-volume ----------------------------------------------------------------------------

LemmaReport verify_log_volume(const PshSample& s, const PshOptions& opt) {
  LemmaReport rep = start("log-volume", s);
  const int n = s.n();
  require(s.l1() > 0.0, "psh", "log-volume needs a nonzero sample");
  auto ratio_rows = [&](const std::vector<cplx>& c, int level) {
    std::vector<RatioRow> rows;
    const int res = opt.res << level;
    for (double r : dyadic_set(0.25, opt.eps_count, level > 0)) {
      RatioRow row;
      row.param = r;
      row.num = integrate_complex_ball(n, c.data(), r, res, s.focus_scale(), [&](const cplx* z) { return std::abs(s(z)); });
      const double V = ball_volume_c(n, r);
      row.den = V * std::max(1.0, -std::log(V)) * s.l1();
      row.ratio = row.num / row.den;
      rows.push_back(row);
    }
    return rows;
  };
  Series main = named("ratio");
  main.rows = ratio_rows(s.focus(), 0);
  main.refined = ratio_rows(s.focus(), 1);
  finish_ratio_series(main);
  rep.series.push_back(main);
  // balls away from the focus, for comparison only
  auto off = s.focus();
  off[0] += 1.0;
  Series away = named("off-focus");
  away.gating = false;
  away.rows = ratio_rows(off, 0);
  away.refined = ratio_rows(off, 1);
  finish_ratio_series(away);
  rep.series.push_back(away);
  finish_report(rep);
  return rep;
}

// ---- tubes ---------------------------------------------------------------------------------

namespace {

// (x, w) with z = x + i (h(x) + eps w): x in the unit ball graded at the foot of the focus,
// w in the unit ball.
struct TubeRule {
  NodeSet x, w;
  std::vector<double> hx;
};

TubeRule tube_rule(const PshSample& s, const GraphManifold& m, double eps, double xr, int res) {
  const int n = s.n();
  TubeRule t;
  const std::vector<double> zero(n, 0.0);
  const auto x0 = foot(s, xr);
  t.x = real_ball_nodes(n, zero.data(), xr, x0.data(), res, eps);
  std::vector<double> h0(n), w0(n, 0.0);
  m.h(x0.data(), h0.data());
  const auto f = s.focus();
  for (int j = 0; j < n; ++j) w0[j] = (f[j].imag() - h0[j]) / eps;
  if (norm_of(w0.data(), n) >= 0.9) std::fill(w0.begin(), w0.end(), 0.0);
  t.w = real_ball_nodes(n, zero.data(), 1.0, w0.data(), res, 0.0);
  t.hx.resize(static_cast<std::size_t>(t.x.size()) * n);
  for (int i = 0; i < t.x.size(); ++i) m.h(t.x.at(i), t.hx.data() + static_cast<std::size_t>(i) * n);
  return t;
}

double tube_integral(const TubeRule& t, int n, double eps, const std::function<double(const cplx*)>& f) {
  std::vector<double> part(t.x.size(), 0.0);
  parallel_for(t.x.size(), [&](int i) {
    const double* x = t.x.at(i);
    const double* h = t.hx.data() + static_cast<std::size_t>(i) * n;
    cplx z[2];
    double acc = 0.0;
    for (int k = 0; k < t.w.size(); ++k) {
      const double* w = t.w.at(k);
      for (int j = 0; j < n; ++j) z[j] = cplx(x[j], h[j] + eps * w[j]);
      acc += t.w.w[k] * f(z);
    }
    part[i] = t.x.w[i] * acc;
  });
  double s = 0.0;
  for (double v : part) s += v;
  return s * std::pow(eps, n);
}

}  // namespace

LemmaReport verify_tube_l1(const PshSample& s, const GraphManifold& m, const PshOptions& opt) {
  LemmaReport rep = start("tube-l1", s);
  const int n = s.n();
  require(m.dim() == n, "psh", "tube manifold must have d = n");
  Series se = named("ratio");
  for (int level = 0; level < 2; ++level) {
    auto& rows = level ? se.refined : se.rows;
    for (double eps : dyadic_set(opt.eps_max, opt.eps_count, level > 0)) {
      const TubeRule t = tube_rule(s, m, eps, 1.0, opt.res << level);
      RatioRow row;
      row.param = eps;
      row.num = tube_integral(t, n, eps, [&](const cplx* z) { return std::abs(s(z)); });
      row.den = std::pow(eps, n) * std::abs(std::log(eps)) * s.l1();
      row.ratio = row.num / row.den;
      rows.push_back(row);
    }
  }
  finish_ratio_series(se);
  rep.series.push_back(se);
  finish_report(rep);
  return rep;
}

LemmaReport verify_tube_ddc(const PshSample& s, const GraphManifold& m, const PshOptions& opt) {
  LemmaReport rep = start("tube-ddc", s);
  const int n = s.n();
  require(m.dim() == n, "psh", "tube manifold must have d = n");
  Series se = named("ratio");
  for (int level = 0; level < 2; ++level) {
    auto& rows = level ? se.refined : se.rows;
    const int res = opt.res << level;
    for (double eps : dyadic_set(opt.eps_max, opt.eps_count, level > 0)) {
      const TubeRule t = tube_rule(s, m, eps, 1.0, res);
      RatioRow row;
      row.param = eps;
      row.num = tube_integral(t, n, eps, [&](const cplx* z) { return s.density(z); });
      row.num += layer_mass_in(
          s,
          [&](const cplx* z) {
            if (!in_graph_domain(z, n)) return false;
            double x[2], h[2], d2 = 0.0;
            for (int j = 0; j < n; ++j) x[j] = z[j].real();
            m.h(x, h);
            for (int j = 0; j < n; ++j) d2 += (z[j].imag() - h[j]) * (z[j].imag() - h[j]);
            return d2 <= eps * eps;
          },
          res);
      row.den = std::pow(eps, n - 1) * s.l1();
      row.ratio = row.num / row.den;
      rows.push_back(row);
    }
  }
  finish_ratio_series(se);
  rep.series.push_back(se);
  std::vector<double> x, y;
  for (const auto& r : se.rows) {
    x.push_back(r.param);
    y.push_back(r.num);
  }
  SlopeFit fit;
  if (positive_fit(x, y, fit)) {
    rep.has_slope = true;
    rep.slope = fit.slope;
    rep.slope_threshold = n - 1 - 0.15;
  } else {
    rep.note = "no mass in any tube";
  }
  finish_report(rep);
  return rep;
}

std::vector<ClosedFormCheck> closed_form_checks(int res) {
  const double M = 4.0;
  std::vector<ClosedFormCheck> out;
  auto add = [&](std::string name, double quad, double closed) {
    ClosedFormCheck c{std::move(name), quad, closed, 0.0, false};
    c.rel_err = std::abs(quad - closed) / std::max(std::abs(closed), 1e-300);
    c.pass = c.rel_err <= 1e-2;
    out.push_back(c);
  };
  for (int n = 1; n <= 2; ++n) {
    const std::vector<cplx> c(n, 0.0);
    const PshSample t(n, {{TermKind::TruncLog, c, M, 1.0}}, 0.0, "trunc-log", {M}, 0);
    for (double r : {0.5, 0.1, 0.01}) {
      const double q = integrate_complex_ball(n, c.data(), r, res, std::exp(-M), [&](const cplx* z) { return std::abs(t(z)); });
      add("ball-l1 n=" + std::to_string(n) + " r=" + fmt_g(r), q, trunc_log_ball_l1(n, M, r));
    }
  }
  const std::vector<cplx> c0{0.0};
  const PshSample t(1, {{TermKind::TruncLog, c0, M, 1.0}}, 0.0, "trunc-log", {M}, 0);
  const PshSample lg(1, {{TermKind::Log, c0, 0.0, 1.0}}, 0.0, "log", {}, 0);
  add("disc2-l1", psh_l1_norm(t, res), trunc_log_disc2_l1(M));
  // the tube around the zero graph in C is the strip [-1, 1] x [-eps, eps]
  const GraphManifold flat = GraphManifold::from_spec("zero", 1, {}, 0);
  for (double eps : {0.25, 0.0625, 0.02}) {
    const TubeRule r = tube_rule(t, flat, eps, 1.0, res);
    add("strip-l1 eps=" + fmt_g(eps), tube_integral(r, 1, eps, [&](const cplx* z) { return std::abs(t(z)); }),
        trunc_log_strip_l1(M, eps));
    const TubeRule rl = tube_rule(lg, flat, eps, 1.0, res);
    add("rect-log eps=" + fmt_g(eps), tube_integral(rl, 1, eps, [&](const cplx* z) { return lg(z); }),
        log_rect_integral(1.0, eps));
  }
  for (double eps : {0.25, 0.02, 0.01, 0.005}) {
    const double q = layer_mass_in(t, [&](const cplx* z) { return std::abs(z[0].imag()) <= eps && std::abs(z[0].real()) <= 1.0; }, res);
    add("strip-mass eps=" + fmt_g(eps), q, trunc_log_strip_mass(M, eps));
  }
  return out;
}

// ---- sublevel ------------------------------------------------------------------------------

void complex_hessian_from_real(int n, const double* real, cplx* out) {
  const int N = 2 * n;
  auto R = [&](int a, int b) { return real[a * N + b]; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out[a * n + b] = 0.25 * cplx(R(a, b) + R(n + a, n + b), R(a, n + b) - R(n + a, b));
}

void phi1_hessian(const GraphManifold& m, const cplx* z, cplx* out, double* real_out) {
  const int n = m.dim();
  double x[2] = {0.0, 0.0}, h[2], dh[4], d2h[8];
  for (int j = 0; j < n; ++j) x[j] = z[j].real();
  m.h(x, h);
  m.dh(x, dh);
  m.d2h(x, d2h);
  const int N = 2 * n;
  double R[16] = {0.0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double xx = 0.0;
      for (int j = 0; j < n; ++j) {
        const double u = z[j].imag() - h[j];
        xx += dh[j * n + a] * dh[j * n + b] - u * d2h[(j * n + a) * n + b];
      }
      R[a * N + b] = 2.0 * xx;
      R[(n + a) * N + (n + b)] = a == b ? 2.0 : 0.0;
      R[a * N + (n + b)] = -2.0 * dh[b * n + a];
      R[(n + b) * N + a] = -2.0 * dh[b * n + a];
    }
  complex_hessian_from_real(n, R, out);
  if (real_out)
    for (int i = 0; i < N * N; ++i) real_out[i] = R[i];
}

double mixed_density(const cplx* u, const cplx* v) {
  const cplx m = u[0] * v[3] + u[3] * v[0] - u[1] * v[2] - u[2] * v[1];
  return 4.0 / (kPi * kPi) * m.real();
}

namespace {

// nodes of the sublevel region {|x| <= xr, sum g(u_j) <= eps} in (x, s) with exact bounds in s
struct SublevelRule {
  NodeSet x;
  std::vector<double> hx;
  // per s node: u offsets and weight
  std::vector<double> u, w;
  int n = 1;
};

SublevelRule sublevel_rule(const PshSample& s, const GraphManifold& m, double eps, int res) {
  const int n = s.n();
  SublevelRule r;
  r.n = n;
  const std::vector<double> zero(n, 0.0);
  const auto x0 = foot(s, 0.5);
  r.x = real_ball_nodes(n, zero.data(), 0.5, x0.data(), res, eps);
  r.hx.resize(static_cast<std::size_t>(r.x.size()) * n);
  for (int i = 0; i < r.x.size(); ++i) m.h(r.x.at(i), r.hx.data() + static_cast<std::size_t>(i) * n);
  const double umax = surrogate_g_inverse(eps);
  const int ns = n == 1 ? 4 * res : res;
  for (int a = 0; a < ns; ++a) {
    const double s1 = -1.0 + (a + 0.5) * 2.0 / ns;
    const double u1 = umax * s1;
    if (n == 1) {
      r.u.push_back(u1);
      r.w.push_back(umax * 2.0 / ns);
      continue;
    }
    const double b = surrogate_g_inverse(std::max(0.0, eps - surrogate_g(u1)));
    for (int c = 0; c < ns; ++c) {
      const double s2 = -1.0 + (c + 0.5) * 2.0 / ns;
      r.u.insert(r.u.end(), {u1, b * s2});
      r.w.push_back(umax * b * 4.0 / (ns * ns));
    }
  }
  return r;
}

double sublevel_integral(const SublevelRule& r, const std::function<double(const cplx*)>& f) {
  const int n = r.n;
  std::vector<double> part(r.x.size(), 0.0);
  parallel_for(r.x.size(), [&](int i) {
    const double* x = r.x.at(i);
    const double* h = r.hx.data() + static_cast<std::size_t>(i) * n;
    cplx z[2];
    double acc = 0.0;
    for (std::size_t k = 0; k < r.w.size(); ++k) {
      for (int j = 0; j < n; ++j) z[j] = cplx(x[j], h[j] + r.u[k * n + j]);
      acc += r.w[k] * f(z);
    }
    part[i] = r.x.w[i] * acc;
  });
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

}  // namespace

LemmaReport verify_sublevel(const PshSample& s, const GraphManifold& m, const PshOptions& opt) {
  LemmaReport rep = start("sublevel", s);
  const int n = s.n();
  require(m.dim() == n, "psh", "sublevel manifold must have d = n");
  require(opt.lambda > 1.0, "psh", "lambda must exceed 1");
  auto rho = [&](const cplx* z) {
    double x[2], h[2], v = 0.0;
    for (int j = 0; j < n; ++j) x[j] = z[j].real();
    m.h(x, h);
    for (int j = 0; j < n; ++j) v += surrogate_g(z[j].imag() - h[j]);
    return v;
  };
  auto in_A = [&](const cplx* z) {
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) r2 += z[j].real() * z[j].real();
    return r2 <= 0.25;
  };
  // sup of phi_1 over the lambda eps sublevel, sampled on the closed s grid
  auto a_of = [&](double le, int res) {
    const double umax = surrogate_g_inverse(le);
    const int ns = 2 * res;
    double best = 0.0;
    for (int a = 0; a <= ns; ++a) {
      const double u1 = umax * (-1.0 + 2.0 * a / ns);
      if (n == 1) {
        best = std::max(best, u1 * u1);
        continue;
      }
      const double b = surrogate_g_inverse(std::max(0.0, le - surrogate_g(u1)));
      for (int c = 0; c <= ns; ++c) {
        const double u2 = b * (-1.0 + 2.0 * c / ns);
        best = std::max(best, u1 * u1 + u2 * u2);
      }
    }
    return best;
  };
  std::vector<int> powers{0};
  if (n == 2) powers.push_back(1);
  std::vector<Series> out;
  for (int p : powers) out.push_back(named("p=" + std::to_string(p)));
  for (int level = 0; level < 2; ++level) {
    const int res = opt.res << level;
    const std::vector<cplx> origin(n, 0.0);
    double T = integrate_complex_ball(n, origin.data(), 1.0, res, s.focus_scale(), [&](const cplx* z) { return s.density(z); });
    T += layer_mass_in(s, [&](const cplx* z) { return std::norm(z[0]) + (n == 2 ? std::norm(z[1]) : 0.0) < 1.0; }, res);
    for (double eps : dyadic_set(opt.eps_max, opt.eps_count, level > 0)) {
      const SublevelRule rule = sublevel_rule(s, m, eps, res);
      const double a = a_of(opt.lambda * eps, res);
      auto inside = [&](const cplx* z) { return in_A(z) && rho(z) <= eps; };
      for (std::size_t q = 0; q < powers.size(); ++q) {
        const int p = powers[q];
        RatioRow row;
        row.param = eps;
        if (p == 0) {
          row.num = sublevel_integral(rule, [&](const cplx* z) { return s.density(z); }) + layer_mass_in(s, inside, res);
        } else {
          row.num = sublevel_integral(rule, [&](const cplx* z) {
            cplx u[4], v[4];
            s.hessian(z, u);
            phi1_hessian(m, z, v);
            return mixed_density(u, v);
          });
          for (const auto& L : s.layers()) {
            const NodeSet ns = sphere_nodes(n, L.centre.data(), L.radius, res);
            row.num += L.mass * ns.sum([&](const double* xp) {
              const cplx* z = reinterpret_cast<const cplx*>(xp);
              if (!inside(z)) return 0.0;
              cplx E[4], v[4];
              cplx e[2] = {(z[0] - L.centre[0]) / L.radius, (z[1] - L.centre[1]) / L.radius};
              for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) E[j * 2 + k] = std::conj(e[j]) * e[k];
              phi1_hessian(m, z, v);
              // mixed(E, v) normalized so that mixed(E, identity) = 1 on the unit sphere
              return mixed_density(E, v) * kPi * kPi / 4.0;
            });
          }
        }
        row.den = std::pow(a / eps, p) * T;
        row.ratio = row.den > 0.0 ? row.num / row.den : 0.0;
        (level ? out[q].refined : out[q].rows).push_back(row);
      }
    }
  }
  for (auto& se : out) {
    finish_ratio_series(se);
    if (se.name == "p=0" && se.sup_refined > 1.0 + 1e-2) {
      se.pass = false;
      se.note = "mass exceeds the total";
    }
    rep.series.push_back(se);
  }
  finish_report(rep);
  return rep;
}

// ---- surrogate -----------------------------------------------------------------------------

namespace {

struct TestFunction {
  std::string name;
  bool gating = true;
  // value, real gradient (2n) and real Hessian (2n x 2n) at X = (x, y)
  std::function<void(const double*, double&, double*, double*)> eval;
};

}  // namespace

LemmaReport verify_surrogate(int n, const GraphManifold& m, const PshOptions& opt) {
  require(m.dim() == n, "psh", "surrogate manifold must have d = n");
  LemmaReport rep;
  rep.lemma = "surrogate";
  rep.family = "-";
  rep.n = n;
  const int N = 2 * n;
  const double A = opt.surrogate_a, B = opt.surrogate_b < 0.0 ? 2.0 * n : opt.surrogate_b;
  std::vector<TestFunction> fs;
  for (int j = 0; j < n; ++j)
    fs.push_back({"graph-" + std::to_string(j + 1), true, [&m, j, n, N](const double* X, double& v, double* g, double* H) {
                    double h[2], dh[4], d2h[8];
                    m.h(X, h);
                    m.dh(X, dh);
                    m.d2h(X, d2h);
                    v = X[n + j] - h[j];
                    std::fill(g, g + N, 0.0);
                    std::fill(H, H + N * N, 0.0);
                    for (int a = 0; a < n; ++a) {
                      g[a] = -dh[j * n + a];
                      for (int b = 0; b < n; ++b) H[a * N + b] = -d2h[(j * n + a) * n + b];
                    }
                    g[n + j] = 1.0;
                  }});
  fs.push_back({"linear", true, [n, N](const double* X, double& v, double* g, double* H) {
                  const double c[4] = {0.3, 0.2, 0.4, -0.3};
                  std::fill(g, g + N, 0.0);
                  std::fill(H, H + N * N, 0.0);
                  v = 0.0;
                  for (int a = 0; a < n; ++a) {
                    g[a] = c[a];
                    g[n + a] = c[2 + a];
                    v += c[a] * X[a] + c[2 + a] * X[n + a];
                  }
                }});
  fs.push_back({"curved", false, [N](const double* X, double& v, double* g, double* H) {
                  v = 0.5;
                  std::fill(H, H + N * N, 0.0);
                  for (int a = 0; a < N; ++a) {
                    v -= 0.5 * X[a] * X[a];
                    g[a] = -X[a];
                    H[a * N + a] = -1.0;
                  }
                }});
  const std::vector<int> ks{3, 4, 8, opt.surrogate_k, 2 * opt.surrogate_k};

  // grid of (x, u) with |x| <= 1, |u_j| <= 1, y = h(x) + u; x is pulled in slightly so the
  // difference stencil stays in the domain of h
  auto grid = [&](int pts) {
    std::vector<std::vector<double>> X;
    std::vector<double> axis(pts);
    for (int i = 0; i < pts; ++i) axis[i] = -1.0 + 2.0 * i / (pts - 1);
    std::vector<int> idx(N, 0);
    while (true) {
      std::vector<double> p(N);
      for (int a = 0; a < N; ++a) p[a] = (a < n ? 1.0 - 1e-4 : 1.0) * axis[idx[a]];
      if (norm_of(p.data(), n) <= 1.0 - 1e-4) {
        double h[2];
        m.h(p.data(), h);
        for (int j = 0; j < n; ++j) p[n + j] += h[j];
        X.push_back(p);
      }
      int a = 0;
      while (a < N && ++idx[a] == pts) idx[a++] = 0;
      if (a == N) break;
    }
    return X;
  };

  Series fd = named("fd-vs-chain");
  fd.note = "max |FD - chain| over the grid";
  std::vector<Series> margins;
  for (const auto& f : fs) {
    Series se = named("margin-" + f.name);
    se.gating = f.gating;
    margins.push_back(se);
  }
  for (int level = 0; level < 2; ++level) {
    const auto X = grid((n == 1 ? 4 * opt.res : std::max(4, opt.res / 2)) * (1 << level) + 1);
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      const auto& f = fs[fi];
      // ||D^2 f|| as the sup of the Hessian operator norm
      std::vector<double> opn(X.size());
      parallel_for(static_cast<int>(X.size()), [&](int i) {
        double v, g[4], H[16];
        f.eval(X[i].data(), v, g, H);
        Eigen::MatrixXd M(N, N);
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b) M(a, b) = H[a * N + b];
        opn[i] = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
      });
      const double D2 = *std::max_element(opn.begin(), opn.end());
      for (int k : ks) {
        const ConvexSurrogate gk(k);
        std::vector<double> worst(X.size()), disc(X.size());
        parallel_for(static_cast<int>(X.size()), [&](int i) {
          double v, g[4], H[16];
          f.eval(X[i].data(), v, g, H);
          cplx fc[4], dfc[2];
          complex_hessian_from_real(n, H, fc);
          for (int a = 0; a < n; ++a) dfc[a] = 0.5 * cplx(g[a], -g[n + a]);
          cplx G[4], M[4];
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              G[a * n + b] = gk.d1(v) * fc[a * n + b] + gk.q(v) * dfc[a] * std::conj(dfc[b]);
          // second route: central differences of the composite
          const double step = 1e-5;
          double R[16];
          std::vector<double> P(X[i]);
          auto comp = [&](int a, double sa, int b, double sb) {
            std::vector<double> Q(P);
            Q[a] += sa;
            Q[b] += sb;
            double vv, gg[4], HH[16];
            f.eval(Q.data(), vv, gg, HH);
            return gk.value(vv);
          };
          for (int a = 0; a < N; ++a)
            for (int b = a; b < N; ++b) {
              const double val = a == b ? (comp(a, step, a, 0.0) - 2.0 * gk.value(v) + comp(a, -step, a, 0.0)) / (step * step)
                                        : (comp(a, step, b, step) - comp(a, step, b, -step) - comp(a, -step, b, step) +
                                           comp(a, -step, b, -step)) /
                                              (4.0 * step * step);
              R[a * N + b] = R[b * N + a] = val;
            }
          cplx Gfd[4];
          complex_hessian_from_real(n, R, Gfd);
          double dmax = 0.0;
          for (int e = 0; e < n * n; ++e) dmax = std::max(dmax, std::abs(Gfd[e] - G[e]));
          disc[i] = dmax;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              M[a * n + b] = A * G[a * n + b] - dfc[a] * std::conj(dfc[b]) + (a == b ? B * D2 : 0.0);
          worst[i] = min_eig_hermitian(n, M);
        });
        RatioRow row;
        row.param = k;
        row.num = *std::min_element(worst.begin(), worst.end());
        row.den = 1.0;
        row.ratio = row.num;
        (level ? margins[fi].refined : margins[fi].rows).push_back(row);
        RatioRow drow;
        drow.param = k;
        drow.num = *std::max_element(disc.begin(), disc.end());
        drow.den = 1.0;
        drow.ratio = drow.num;
        (level ? fd.refined : fd.rows).push_back(drow);
      }
    }
  }
  for (auto& se : margins) {
    finish_margin_series(se, 1e-9);
    rep.series.push_back(se);
  }
  finish_ratio_series(fd);
  fd.pass = fd.sup <= 5e-3 && fd.sup_refined <= 5e-3;
  rep.series.push_back(fd);

  // q_k >= 1/3 on [-1, 1] and g_k -> g
  Series conv = named("min-q"), gap = named("sup-gap");
  for (int k : {3, 4, 8, 16, 32, 64, 128}) {
    const ConvexSurrogate gk(k);
    conv.rows.push_back({double(k), gk.min_q(), 1.0 / 3.0, gk.min_q()});
    gap.rows.push_back({double(k), gk.sup_gap(), 1.0, gk.sup_gap()});
  }
  conv.refined = conv.rows;
  finish_margin_series(conv, 0.0);
  conv.pass = conv.pass && conv.sup >= 1.0 / 3.0 - 1e-12;
  gap.refined = gap.rows;
  gap.sup = gap.rows.front().ratio;
  gap.sup_refined = gap.rows.back().ratio;
  gap.pass = true;
  for (std::size_t i = 1; i < gap.rows.size(); ++i)
    if (gap.rows[i].ratio > gap.rows[i - 1].ratio) gap.pass = false;
  gap.pass = gap.pass && gap.sup_refined < 0.1 * gap.sup;
  rep.series.push_back(conv);
  rep.series.push_back(gap);
  finish_report(rep);
  return rep;
}

// ---- pullbacks -----------------------------------------------------------------------------

cplx DiscGrid::z(int i, int k) const { return std::polar(1.0 - s[i], 2.0 * kPi * (k + 0.5) / n_theta); }

double DiscGrid::area(int i, int k) const {
  (void)k;
  return (1.0 - s[i]) * ds[i] * 2.0 * kPi / n_theta;
}

double DiscMeasure::total() const {
  double t = 0.0;
  for (double m : mass) t += m;
  return t;
}

double DiscMeasure::weighted(double delta) const {
  double t = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) t += mass[i] * std::pow(std::max(0.0, 1.0 - std::abs(z[i])), delta);
  return t;
}

double DiscMeasure::annulus(double eps) const {
  double t = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double s = 1.0 - std::abs(z[i]);
    if (s <= 2.0 * eps) t += mass[i] * s;
  }
  return t;
}

namespace {

DiscGrid make_grid(const DiscFamily& fam, const DiscMember& mem, int res) {
  DiscGrid g;
  g.d = fam.dim();
  g.member = &mem;
  radial_cells(1.0, 1e-5, 4 * res, g.s, g.ds);
  g.n_theta = 32 * res;
  const int ns = static_cast<int>(g.s.size());
  const std::size_t total = static_cast<std::size_t>(ns) * g.n_theta * g.d;
  g.F.resize(total);
  g.dF.resize(total);
  parallel_for(ns, [&](int i) {
    std::vector<cplx> gy(g.d);
    for (int k = 0; k < g.n_theta; ++k) {
      const std::size_t o = (static_cast<std::size_t>(i) * g.n_theta + k) * g.d;
      fam.eval(mem, g.z(i, k), g.F.data() + o);
      fam.gradient(mem, g.z(i, k), g.dF.data() + o, gy.data());
    }
  });
  return g;
}

}  // namespace

DiscMeasure pullback_measure(const PshSample& s, const DiscFamily& fam, const DiscGrid& g) {
  const int n = s.n();
  require(g.d == n, "psh", "disc dimension must equal n");
  const int ns = static_cast<int>(g.s.size()), nt = g.n_theta;
  DiscMeasure out;
  // absolutely continuous part
  std::vector<double> dens(static_cast<std::size_t>(ns) * nt, 0.0);
  parallel_for(ns, [&](int i) {
    cplx H[4];
    for (int k = 0; k < nt; ++k) {
      const std::size_t o = (static_cast<std::size_t>(i) * nt + k) * n;
      const cplx* F = g.F.data() + o;
      const cplx* dF = g.dF.data() + o;
      s.hessian(F, H);
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v += (H[a * n + b] * dF[a] * std::conj(dF[b])).real();
      dens[static_cast<std::size_t>(i) * nt + k] = 2.0 / kPi * v * g.area(i, k);
    }
  });
  for (int i = 0; i < ns; ++i)
    for (int k = 0; k < nt; ++k) {
      const double m = dens[static_cast<std::size_t>(i) * nt + k];
      if (m != 0.0) {
        out.z.push_back(g.z(i, k));
        out.mass.push_back(m);
      }
    }

  auto eval_at = [&](cplx z, std::vector<cplx>& F, std::vector<cplx>& dF) {
    std::vector<cplx> gy(n);
    fam.eval(*g.member, z, F.data());
    fam.gradient(*g.member, z, dF.data(), gy.data());
  };
  const double dth = 2.0 * kPi / nt;
  for (const auto& term : s.terms()) {
    if (term.kind == TermKind::TruncLog) {
      // kink curve {|F - a| = R}: mass |grad v| / (2 pi) per unit length
      const double R2 = std::exp(-2.0 * term.M);
      auto L = [&](int i, int k) {
        const cplx* F = g.F.data() + (static_cast<std::size_t>(i) * nt + ((k % nt + nt) % nt)) * n;
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += std::norm(F[j] - term.centre[j]);
        return v - R2;
      };
      struct P {
        double s, th;
      };
      std::vector<std::pair<P, P>> segs;
      for (int i = 0; i + 1 < ns; ++i)
        for (int k = 0; k < nt; ++k) {
          const double v[4] = {L(i, k), L(i + 1, k), L(i + 1, k + 1), L(i, k + 1)};
          const bool neg[4] = {v[0] < 0, v[1] < 0, v[2] < 0, v[3] < 0};
          if (neg[0] == neg[1] && neg[1] == neg[2] && neg[2] == neg[3]) continue;
          const double th0 = 2.0 * kPi * (k + 0.5) / nt;
          const P c[4] = {{g.s[i], th0}, {g.s[i + 1], th0}, {g.s[i + 1], th0 + dth}, {g.s[i], th0 + dth}};
          P e[4];
          bool has[4];
          for (int a = 0; a < 4; ++a) {
            const int b = (a + 1) % 4;
            has[a] = neg[a] != neg[b];
            if (has[a]) {
              const double t = v[a] / (v[a] - v[b]);
              e[a] = {c[a].s + t * (c[b].s - c[a].s), c[a].th + t * (c[b].th - c[a].th)};
            }
          }
          std::vector<int> idx;
          for (int a = 0; a < 4; ++a)
            if (has[a]) idx.push_back(a);
          if (idx.size() == 2) {
            segs.push_back({e[idx[0]], e[idx[1]]});
          } else if (idx.size() == 4) {
            const bool cneg = (v[0] + v[1] + v[2] + v[3]) < 0;
            if (cneg == neg[0]) {
              segs.push_back({e[0], e[1]});
              segs.push_back({e[2], e[3]});
            } else {
              segs.push_back({e[3], e[0]});
              segs.push_back({e[1], e[2]});
            }
          }
        }
      std::vector<double> mass(segs.size());
      std::vector<cplx> mid(segs.size());
      parallel_for(static_cast<int>(segs.size()), [&](int q) {
        const auto& [a, b] = segs[q];
        const cplx za = std::polar(1.0 - a.s, a.th), zb = std::polar(1.0 - b.s, b.th);
        const cplx zm = std::polar(1.0 - 0.5 * (a.s + b.s), 0.5 * (a.th + b.th));
        std::vector<cplx> F(n), dF(n);
        eval_at(zm, F, dF);
        cplx num = 0.0;
        double w2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const cplx w = F[j] - term.centre[j];
          num += std::conj(w) * dF[j];
          w2 += std::norm(w);
        }
        mass[q] = term.weight * std::abs(num) / w2 / (2.0 * kPi) * std::abs(za - zb);
        mid[q] = zm;
      });
      for (std::size_t q = 0; q < segs.size(); ++q) {
        out.z.push_back(mid[q]);
        out.mass.push_back(mass[q]);
      }
      out.segments += static_cast<int>(segs.size());
    } else if (term.kind == TermKind::Log) {
      // preimages of the pole: local minima of |F - a| refined by Gauss-Newton
      std::vector<cplx> found;
      auto dist = [&](int i, int k) {
        const cplx* F = g.F.data() + (static_cast<std::size_t>(i) * nt + ((k % nt + nt) % nt)) * n;
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += std::norm(F[j] - term.centre[j]);
        return v;
      };
      for (int i = 1; i + 1 < ns; ++i)
        for (int k = 0; k < nt; ++k) {
          const double v = dist(i, k);
          if (v > dist(i - 1, k) || v > dist(i + 1, k) || v > dist(i, k - 1) || v > dist(i, k + 1)) continue;
          cplx z = g.z(i, k);
          std::vector<cplx> F(n), dF(n);
          double res = 1e300;
          for (int it = 0; it < 60; ++it) {
            eval_at(z, F, dF);
            cplx num = 0.0;
            double den = 0.0;
            res = 0.0;
            for (int j = 0; j < n; ++j) {
              num += std::conj(dF[j]) * (F[j] - term.centre[j]);
              den += std::norm(dF[j]);
              res += std::norm(F[j] - term.centre[j]);
            }
            if (res < 1e-26 || den == 0.0) break;
            z -= num / den;
            if (std::abs(z) >= 1.0) break;
          }
          if (res > 1e-24 || std::abs(z) >= 1.0) continue;
          bool dup = false;
          for (const auto& q : found) dup = dup || std::abs(q - z) < 1e-8;
          if (!dup) found.push_back(z);
        }
      for (const auto& z : found) {
        out.z.push_back(z);
        out.mass.push_back(term.weight);
        ++out.atoms;
      }
    }
  }
  return out;
}

bool PairingCheck::ok() const { return std::abs(measure - function) <= tol; }

PairingCheck pullback_pairing_check(const PshSample& s, const DiscFamily& fam, const DiscGrid& g, int res) {
  const double Rb = 0.95;
  auto psi = [&](cplx z) {
    const double q = std::norm(z) / (Rb * Rb);
    return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  auto lap = [&](cplx z) {
    const double q = std::norm(z) / (Rb * Rb);
    if (q >= 1.0) return 0.0;
    const double f = std::exp(1.0 - 1.0 / (1.0 - q)), u = 1.0 - q;
    const double f1 = -f / (u * u), f2 = f * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
    return (4.0 * q * f2 + 4.0 * f1) / (Rb * Rb);
  };
  PairingCheck pc;
  const DiscMeasure mu = pullback_measure(s, fam, g);
  for (std::size_t i = 0; i < mu.z.size(); ++i) pc.measure += mu.mass[i] * psi(mu.z[i]);
  const int nr = 8 * res, nt = 32 * res, n = s.n();
  std::vector<double> part(nr, 0.0), size(nr, 0.0);
  parallel_for(nr, [&](int i) {
    const double r = (i + 0.5) * Rb / nr;
    std::vector<cplx> F(n);
    for (int k = 0; k < nt; ++k) {
      const cplx z = std::polar(r, 2.0 * kPi * (k + 0.5) / nt);
      fam.eval(*g.member, z, F.data());
      const double v = s(F.data()) * lap(z) / (2.0 * kPi) * r * (Rb / nr) * (2.0 * kPi / nt);
      part[i] += v;
      size[i] += std::abs(v);
    }
  });
  double total = 0.0;
  for (int i = 0; i < nr; ++i) {
    pc.function += part[i];
    total += size[i];
  }
  pc.tol = 2e-2 * (std::abs(pc.measure) + total) + 1e-12;
  return pc;
}

PullbackContext::PullbackContext(std::shared_ptr<const DiscFamily> fam, int res) : fam_(std::move(fam)), res_(res) {
  require(fam_ != nullptr, "psh", "null disc family");
  const int d = fam_->dim();
  const auto cov = boundary_coverage(*fam_, std::vector<double>(d - 1, 0.0), 41, 21);
  if (!cov.injective) fail(ErrorKind::Coverage, "psh", "boundary coverage not certified");
  radius_ = cov.radius;
  boundary_.resize(2);
  grids_.resize(2);
}

const std::vector<PullbackContext::BoundaryNode>& PullbackContext::boundary(int level) const {
  std::lock_guard<std::mutex> lock(mu_);
  require(level == 0 || level == 1, "psh", "two refinement levels");
  if (boundary_[level]) return *boundary_[level];
  const int d = fam_->dim(), res = res_ << level;
  const double arc = fam_->problem().seed().theta_u0;
  const double o = 0.0;
  const NodeSet th = real_ball_nodes(1, &o, arc, &o, res, arc / 64.0);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> taus;
  std::vector<double> tw;
  if (d == 1) {
    taus.push_back({{}, {}});
    tw.push_back(1.0);
  } else {
    const int n1 = 3 << level, n2 = 9 << level;
    const double e1 = fam_->options().tau_extent, e2 = 0.95;
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) {
        taus.push_back({{-e1 + (a + 0.5) * 2.0 * e1 / n1}, {-e2 + (b + 0.5) * 2.0 * e2 / n2}});
        tw.push_back((2.0 * e1 / n1) * (2.0 * e2 / n2));
      }
  }
  std::vector<std::vector<BoundaryNode>> rows(taus.size());
  parallel_for(static_cast<int>(taus.size()), [&](int q) {
    const DiscMember m = fam_->member(taus[q].first, taus[q].second);
    for (int i = 0; i < th.size(); ++i) {
      BoundaryNode b{std::vector<cplx>(d), th.w[i] * tw[q]};
      fam_->eval(m, std::polar(1.0, th.at(i)[0]), b.F.data());
      rows[q].push_back(std::move(b));
    }
  });
  auto out = std::make_unique<std::vector<BoundaryNode>>();
  for (auto& r : rows)
    for (auto& b : r) out->push_back(std::move(b));
  boundary_[level] = std::move(out);
  return *boundary_[level];
}

const std::vector<DiscGrid>& PullbackContext::grids(int level) const {
  std::lock_guard<std::mutex> lock(mu_);
  require(level == 0 || level == 1, "psh", "two refinement levels");
  if (grids_[level]) return *grids_[level];
  auto out = std::make_unique<std::vector<DiscGrid>>();
  for (const auto& m : fam_->members()) out->push_back(make_grid(*fam_, m, res_ << level));
  grids_[level] = std::move(out);
  return *grids_[level];
}

std::shared_ptr<const DiscFamily> reference_family(const GraphManifold& m) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::string, std::vector<double>>, std::shared_ptr<const DiscFamily>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{m.dim(), m.family_name(), m.params()}];
  if (slot) return slot;
  static const SeedFunction seed = construct_seed(SeedOptions{});
  auto prob = std::make_shared<BishopProblem>(m.with_zdim(0), seed, 256);
  SolverOptions so;
  FamilyOptions fo;
  fo.t = find_t_max(*prob, so, 0.999, 16).t_max / 2.0;
  fo.solver = so;
  slot = std::make_shared<const DiscFamily>(build_family(prob, fo));
  return slot;
}

std::shared_ptr<const DiscFamily> reference_family(int d, const std::string& manifold) {
  return reference_family(GraphManifold::from_spec(manifold, d, {}, 0));
}

const PullbackContext& shared_pullback_context(const GraphManifold& m, int res) {
  auto fam = reference_family(m);
  static std::mutex mu;
  static std::map<std::pair<const DiscFamily*, int>, std::unique_ptr<PullbackContext>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{fam.get(), res}];
  if (!slot) slot = std::make_unique<PullbackContext>(fam, res);
  return *slot;
}

LemmaReport verify_pullback(const PshSample& s, const PullbackContext& ctx, const PshOptions& opt) {
  (void)opt;
  LemmaReport rep = start("pullback", s);
  const int n = s.n();
  require(ctx.dim() == n, "psh", "disc dimension must equal n");
  const GraphManifold& m = ctx.family().problem().manifold();
  const double r = ctx.coverage_radius();
  Series one = named("one"), absphi = named("abs-phi");
  for (int level = 0; level < 2; ++level) {
    const int res = ctx.res(level);
    const std::vector<double> zero(n, 0.0);
    const auto x0 = foot(s, r);
    const NodeSet xs = real_ball_nodes(n, zero.data(), r, x0.data(), res, r / 32.0);
    auto lhs = [&](const std::function<double(const cplx*)>& g) {
      double acc = 0.0;
      for (int i = 0; i < xs.size(); ++i) {
        double h[2];
        m.h(xs.at(i), h);
        cplx z[2];
        for (int j = 0; j < n; ++j) z[j] = cplx(xs.at(i)[j], h[j]);
        acc += xs.w[i] * g(z);
      }
      return acc;
    };
    const auto& nodes = ctx.boundary(level);
    auto rhs = [&](const std::function<double(const cplx*)>& g) {
      double acc = 0.0;
      for (const auto& b : nodes) acc += b.w * g(b.F.data());
      return acc;
    };
    auto add = [&](Series& se, const std::function<double(const cplx*)>& g) {
      RatioRow row;
      row.param = r;
      row.num = lhs(g);
      row.den = rhs(g);
      row.ratio = row.den > 0.0 ? row.num / row.den : std::numeric_limits<double>::infinity();
      (level ? se.refined : se.rows).push_back(row);
    };
    add(one, [](const cplx*) { return 1.0; });
    add(absphi, [&](const cplx* z) { return std::abs(s(z)); });
  }
  finish_ratio_series(one);
  finish_ratio_series(absphi);
  rep.series = {one, absphi};
  finish_report(rep);
  return rep;
}

double DiscMeasure::annulus_sup(double kappa, double emin, double emax, double* argmax) const {
  // A(eps) is a right-continuous step function, so the sup of A(eps) / eps^kappa sits at a jump
  // eps = (1 - |z|) / 2 or at emin
  std::vector<std::pair<double, double>> jumps;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double s = 1.0 - std::abs(z[i]);
    jumps.emplace_back(s / 2.0, mass[i] * s);
  }
  std::sort(jumps.begin(), jumps.end());
  double acc = 0.0, best = 0.0, at = emin;
  std::size_t i = 0;
  for (; i < jumps.size() && jumps[i].first <= emin; ++i) acc += jumps[i].second;
  best = acc / std::pow(emin, kappa);
  while (i < jumps.size() && jumps[i].first <= emax) {
    const double e = jumps[i].first;
    for (; i < jumps.size() && jumps[i].first == e; ++i) acc += jumps[i].second;
    const double r = acc / std::pow(e, kappa);
    if (r > best) {
      best = r;
      at = e;
    }
  }
  if (argmax) *argmax = at;
  return best;
}

LemmaReport verify_weighted_pullback(const PshSample& s, const PullbackContext& ctx, const PshOptions& opt) {
  LemmaReport rep = start("weighted-pullback", s);
  const int n = s.n();
  require(ctx.dim() == n, "psh", "disc dimension must equal n");
  require(opt.delta > 0.0 && opt.delta < 1.0, "psh", "delta must lie in (0, 1)");
  const double gamma = n == 1 ? 1.0 : opt.delta / (n - 1);
  const double kappa = 1.0 - opt.delta * (n - 1) / (opt.delta + n - 1);
  Series weighted = named("weighted"), annulus = named("annulus"), pairing = named("pairing");
  std::vector<double> fit_x, fit_y;
  for (int level = 0; level < 2; ++level) {
    const auto& grids = ctx.grids(level);
    std::vector<DiscMeasure> mus;
    for (const auto& g : grids) mus.push_back(pullback_measure(s, ctx.family(), g));
    for (std::size_t q = 0; q < mus.size(); ++q) {
      RatioRow row;
      row.param = static_cast<double>(q);
      row.num = mus[q].weighted(opt.delta);
      row.den = std::pow(s.l1(), gamma);
      row.ratio = row.num / row.den;
      (level ? weighted.refined : weighted.rows).push_back(row);
    }
    const auto epss = dyadic_set(opt.eps_max, opt.eps_count + 2, level > 0);
    for (double eps : epss) {
      RatioRow row;
      row.param = eps;
      for (const auto& mu : mus) row.num = std::max(row.num, mu.annulus(eps));
      row.den = std::pow(eps, kappa);
      row.ratio = row.num / row.den;
      (level ? annulus.refined : annulus.rows).push_back(row);
      if (level == 0) {
        fit_x.push_back(eps);
        fit_y.push_back(row.num);
      }
    }
    // the sampled eps miss the peaks of the step function; the sweep gives the sup over the range
    RatioRow peak;
    const double emin = *std::min_element(epss.begin(), epss.end());
    for (const auto& mu : mus) {
      double at = 0.0;
      const double r = mu.annulus_sup(kappa, emin, opt.eps_max, &at);
      if (r > peak.ratio) peak = {at, mu.annulus(at), std::pow(at, kappa), r};
    }
    (level ? annulus.refined : annulus.rows).push_back(peak);
    const PairingCheck pc = pullback_pairing_check(s, ctx.family(), grids.front(), ctx.res(level));
    (level ? pairing.refined : pairing.rows).push_back({0.0, pc.measure, pc.function, std::abs(pc.measure - pc.function) / std::max(pc.tol, 1e-300)});
  }
  finish_ratio_series(weighted);
  finish_ratio_series(annulus);
  finish_ratio_series(pairing);
  pairing.note = "|measure - function| / tolerance";
  pairing.pass = pairing.sup <= 1.0 && pairing.sup_refined <= 1.0;
  rep.series = {weighted, annulus, pairing};
  SlopeFit fit;
  if (positive_fit(fit_x, fit_y, fit)) {
    rep.has_slope = true;
    rep.slope = fit.slope;
    rep.slope_threshold = kappa - 0.1;
  } else {
    rep.note = "pullback measure vanishes";
  }
  finish_report(rep);
  return rep;
}

// ---- suite ---------------------------------------------------------------------------------

const std::vector<std::string> kPshLemmas{"log-volume", "tube-l1", "tube-ddc", "sublevel",
                                          "surrogate", "pullback", "weighted-pullback"};

const std::vector<PshSample>& builtin_samples(int n, int res, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, std::uint64_t>, std::unique_ptr<std::vector<PshSample>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, res, seed}];
  if (slot) return *slot;
  const auto specs = builtin_psh_families(n);
  auto out = std::make_unique<std::vector<PshSample>>(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i)
    (*out)[i] = sample_psh(specs[i].family, n, specs[i].params, seed + i, res);
  slot = std::move(out);
  return *slot;
}

std::vector<LemmaReport> run_psh_lemma(const std::string& lemma, int n, const PshOptions& opt) {
  if (std::find(kPshLemmas.begin(), kPshLemmas.end(), lemma) == kPshLemmas.end())
    fail(ErrorKind::Input, "psh", "unknown lemma id '" + lemma + "'");
  require(n == 1 || n == 2, "psh", "n must be 1 or 2");
  const GraphManifold m = GraphManifold::from_spec("quadratic", n, {}, 0);
  if (lemma == "surrogate") return {verify_surrogate(n, m, opt)};
  const auto specs = builtin_psh_families(n);
  const auto& samples = builtin_samples(n, opt.res, opt.seed);
  if (lemma == "pullback" || lemma == "weighted-pullback") {
    const PullbackContext* c = &shared_pullback_context(m, opt.res);
    std::vector<LemmaReport> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out.push_back(lemma == "pullback" ? verify_pullback(samples[i], *c, opt)
                                        : verify_weighted_pullback(samples[i], *c, opt));
      out.back().family = specs[i].name;
    }
    return out;
  }
  std::vector<LemmaReport> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (lemma == "log-volume") out.push_back(verify_log_volume(s, opt));
    if (lemma == "tube-l1") out.push_back(verify_tube_l1(s, m, opt));
    if (lemma == "tube-ddc") out.push_back(verify_tube_ddc(s, m, opt));
    if (lemma == "sublevel") out.push_back(verify_sublevel(s, m, opt));
    out.back().family = specs[i].name;
  }
  return out;
}

}  // namespace crd
