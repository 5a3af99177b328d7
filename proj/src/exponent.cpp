#include "crdisc/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/parallel.hpp"
#include "crdisc/psh_verify.hpp"
#include "crdisc/trace.hpp"

namespace crd {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

PshTerm at_level(const PairTerm& t, double M, double weight) {
  PshTerm p;
  p.kind = t.kind;
  p.centre = t.centre;
  p.M = M;
  p.weight = weight;
  return p;
}

double term_difference(const PairTerm& t, double M, double gap, const cplx* z) {
  return at_level(t, M, 1.0).value(z) - at_level(t, M + gap, 1.0).value(z);
}

std::vector<double> foot_of(const PairTerm& t) {
  std::vector<double> x(t.centre.size());
  double r2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = t.centre[j].real();
    r2 += x[j] * x[j];
  }
  if (r2 >= 0.81) std::fill(x.begin(), x.end(), 0.0);
  return x;
}

double volume_density(const GraphManifold& m, const double* x) {
  const int d = m.dim();
  double dh[4];
  m.dh(x, dh);
  if (d == 1) return std::sqrt(1.0 + dh[0] * dh[0]);
  // G = I + Dh^T Dh with Dh[j][a] = dh[j * d + a]
  double G[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) G[a][b] = (a == b ? 1.0 : 0.0) + dh[a] * dh[b] + dh[2 + a] * dh[2 + b];
  return std::sqrt(G[0][0] * G[1][1] - G[0][1] * G[1][0]);
}

bool on_real_slice(const PairTerm& t) {
  for (const auto& c : t.centre)
    if (c.imag() != 0.0) return false;
  return true;
}

double ratio_of(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

ChainRow chain_row(const PairFamily& f, const GraphManifold& m, double M, const ExponentOptions& opt) {
  ChainRow row;
  const int n = f.n;
  const PullbackContext& ctx = shared_pullback_context(m, opt.res);
  const DiscFamily& fam = ctx.family();
  const PshSample phi1 = f.phi(M), phi2 = f.phi(M + f.gap);
  auto g = [&](const cplx* z) { return f.difference(z, M); };

  // arc integrals, graded at each term
  const double r = ctx.coverage_radius();
  const std::vector<double> zero(n, 0.0);
  for (const auto& t : f.terms) {
    std::vector<double> x0 = foot_of(t);
    if (std::sqrt(x0[0] * x0[0] + (n == 2 ? x0[1] * x0[1] : 0.0)) >= 0.9 * r) std::fill(x0.begin(), x0.end(), 0.0);
    const NodeSet xs =
        real_ball_nodes(n, zero.data(), r, x0.data(), 2 * opt.res, std::min(r / 32.0, std::exp(-M - f.gap)));
    double acc = 0.0;
    for (int i = 0; i < xs.size(); ++i) {
      double h[2];
      m.h(xs.at(i), h);
      cplx z[2];
      for (int j = 0; j < n; ++j) z[j] = cplx(xs.at(i)[j], h[j]);
      acc += xs.w[i] * term_difference(t, M, f.gap, z);
    }
    row.arc_lhs += f.scale * t.weight * acc;
  }
  for (const auto& b : ctx.boundary(0)) row.arc_rhs += b.w * g(b.F.data());
  row.arc_ratio = ratio_of(row.arc_lhs, row.arc_rhs);

  // weighted pullbacks and the interpolated trace bound, member by member
  const double gamma = n == 1 ? 1.0 : opt.delta / (n - 1);
  const double l1a = psh_l1_norm(phi1, opt.res), l1b = psh_l1_norm(phi2, opt.res);
  const auto& grids = ctx.grids(0);
  for (const auto& grid : grids) {
    const DiscMeasure mu1 = pullback_measure(phi1, fam, grid), mu2 = pullback_measure(phi2, fam, grid);
    const double w1 = mu1.weighted(opt.delta), w2 = mu2.weighted(opt.delta);
    const double den1 = std::pow(std::abs(l1a), gamma), den2 = std::pow(std::abs(l1b), gamma);
    for (auto [w, den] : {std::pair{w1, den1}, std::pair{w2, den2}}) {
      const double q = ratio_of(w, den);
      if (q >= row.weighted_ratio) {
        row.weighted_ratio = q;
        row.weighted = w;
        row.weighted_den = den;
      }
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < grid.s.size(); ++i)
      for (int k = 0; k < grid.n_theta; ++k)
        l1 += grid.area(static_cast<int>(i), k) * g(&grid.F[(i * grid.n_theta + k) * n]);
    const int nb = 4 * grid.n_theta;
    double lhs = 0.0;
    for (int k = 0; k < nb; ++k) {
      cplx F[2];
      fam.eval(*grid.member, std::polar(1.0, 2.0 * kPi * (k + 0.5) / nb), F);
      lhs += g(F);
    }
    lhs *= 2.0 * kPi / nb;
    const double n0 = mu1.weighted(opt.beta0) + mu2.weighted(opt.beta0);
    for (int k = 1; k <= opt.eps_count; ++k) {
      const double eps = std::ldexp(1.0, -k);
      const TraceBound b = interpolated_bound(lhs, l1, n0, mu1.annulus(eps) + mu2.annulus(eps), opt.beta0, opt.beta, eps);
      if (b.ratio >= row.trace_ratio) {
        row.trace_ratio = b.ratio;
        row.trace_lhs = b.lhs;
        row.trace_rhs = b.rhs;
      }
    }
  }
  row.computed = true;
  return row;
}

}  // namespace

bool ChainRow::finite() const {
  return std::isfinite(arc_ratio) && std::isfinite(weighted_ratio) && std::isfinite(trace_ratio);
}

double PairFamily::difference(const cplx* z, double M) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight * term_difference(t, M, gap, z);
  return scale * s;
}

PshSample PairFamily::phi(double M) const {
  std::vector<PshTerm> ts;
  for (const auto& t : terms) ts.push_back(at_level(t, M, scale * t.weight));
  return PshSample(n, ts, 0.0, name, {M}, 0);
}

const std::vector<std::string> kExponentFamilies{"trunc-log", "trunc-log-off", "trunc-log-sum", "smooth-log"};

PairFamily make_pair_family(const std::string& name, const GraphManifold& m, std::uint64_t seed, double gap) {
  const int n = m.dim();
  require(gap >= 0.0, "exponent", "gap must be nonnegative");
  PairFamily f;
  f.name = name;
  f.n = n;
  f.gap = gap;
  const std::vector<cplx> origin(n, 0.0);
  if (name == "trunc-log") {
    f.terms.push_back({TermKind::TruncLog, origin, 1.0});
  } else if (name == "trunc-log-off") {
    std::vector<cplx> c = origin;
    c[0] = cplx(0.0, kOffDistance);
    f.terms.push_back({TermKind::TruncLog, c, 1.0});
  } else if (name == "trunc-log-sum") {
    std::mt19937_64 rng(seed * 1000003ULL + 17);
    for (int k = 0; k < 4; ++k) {
      std::vector<cplx> c(n);
      if (k < 2) {
        double x[2] = {0.0, 0.0}, h[2];
        const double r = 0.5 * std::pow(unit(rng), 1.0 / n), th = 2.0 * kPi * unit(rng);
        x[0] = n == 1 ? (th < kPi ? r : -r) : r * std::cos(th);
        if (n == 2) x[1] = r * std::sin(th);
        m.h(x, h);
        for (int j = 0; j < n; ++j) c[j] = cplx(x[j], h[j]);
      } else {
        // uniform in the ball of radius 0.6 in C^n
        std::normal_distribution<double> g;
        double v[4], s = 0.0;
        for (int j = 0; j < 2 * n; ++j) {
          v[j] = g(rng);
          s += v[j] * v[j];
        }
        const double r = 0.6 * std::pow(unit(rng), 1.0 / (2 * n)) / std::sqrt(s);
        for (int j = 0; j < n; ++j) c[j] = cplx(r * v[2 * j], r * v[2 * j + 1]);
      }
      f.terms.push_back({TermKind::TruncLog, c, 0.5 + 0.5 * unit(rng)});
    }
  } else if (name == "smooth-log") {
    f.terms.push_back({TermKind::SmoothLog, origin, 1.0});
  } else {
    fail(ErrorKind::Input, "exponent", "unknown pair family '" + name + "'");
  }
  return f;
}

std::vector<double> default_sweep() {
  std::vector<double> s;
  for (int k = 0; k <= 12; ++k) s.push_back(2.0 + 0.5 * k);
  return s;
}

std::vector<double> parse_sweep(const std::string& text) {
  auto num = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(ErrorKind::Input, "exponent", "bad sweep value '" + t + "'");
    }
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
  std::vector<double> out;
  if (sep == ':') {
    require(parts.size() == 3, "exponent", "range sweep is a:b:step");
    const double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
    require(h > 0.0 && b >= a, "exponent", "range sweep needs b >= a and step > 0");
    const int count = static_cast<int>(std::floor((b - a) / h + 1e-9));
    for (int k = 0; k <= count; ++k) out.push_back(a + k * h);
  } else {
    for (const auto& p : parts) out.push_back(num(p));
  }
  require(!out.empty(), "exponent", "empty sweep");
  return out;
}

double pair_plane_l1(const PairFamily& f, double M, int res) {
  const int n = f.n;
  double acc = 0.0;
  for (const auto& t : f.terms) {
    auto g = [&](const cplx* z) { return term_difference(t, M, f.gap, z); };
    const double scale = std::exp(-M - f.gap);
    double v;
    if (t.kind == TermKind::TruncLog) {
      // the difference vanishes off the ball of radius e^{-M}
      const double R = std::exp(-M);
      for (const auto& c : t.centre)
        require(std::abs(c) + R < 2.0, "exponent", "truncation ball leaves the bidisc");
      v = integrate_complex_ball(n, t.centre.data(), R, n == 1 ? res : 2 * res, scale, g);
    } else {
      v = integrate_polydisc(n, 2.0, t.centre.data(), res, scale, g);
    }
    acc += t.weight * v;
  }
  return f.scale * acc;
}

double pair_trace_integral(const PairFamily& f, const GraphManifold& m, double M, int res) {
  const int d = m.dim();
  require(d == f.n, "exponent", "pair and manifold dimensions differ");
  const std::vector<double> zero(d, 0.0);
  double acc = 0.0;
  for (const auto& t : f.terms) {
    const auto x0 = foot_of(t);
    const NodeSet xs = real_ball_nodes(d, zero.data(), 1.0, x0.data(), 4 * res, std::exp(-M - f.gap));
    double s = 0.0;
    for (int i = 0; i < xs.size(); ++i) {
      double h[2];
      m.h(xs.at(i), h);
      cplx z[2];
      for (int j = 0; j < d; ++j) z[j] = cplx(xs.at(i)[j], h[j]);
      const double v = term_difference(t, M, f.gap, z);
      if (v != 0.0) s += xs.w[i] * v * volume_density(m, xs.at(i));
    }
    acc += t.weight * s;
  }
  return f.scale * acc;
}

namespace {

double plane_closed(const PairFamily& f, double M) {
  const int n = f.n;
  const double sigma = n == 1 ? 2.0 * kPi : 2.0 * kPi * kPi;
  double acc = 0.0;
  for (const auto& t : f.terms) {
    if (t.kind != TermKind::TruncLog) return kNaN;
    // int over C^n of (-c - log|z|)_+ is sigma e^{-2nc} / (2n)^2
    acc += t.weight * sigma / (4.0 * n * n) * (std::exp(-2.0 * n * M) - std::exp(-2.0 * n * (M + f.gap)));
  }
  return f.scale * acc;
}

double trace_closed(const PairFamily& f, const GraphManifold& m, double M) {
  if (m.family() != ManifoldFamily::Zero) return kNaN;
  const int d = f.n;
  double acc = 0.0;
  for (const auto& t : f.terms) {
    if (t.kind != TermKind::TruncLog || !on_real_slice(t)) return kNaN;
    double r2 = 0.0;
    for (const auto& c : t.centre) r2 += std::norm(c);
    if (std::sqrt(r2) + std::exp(-M) > 1.0) return kNaN;
    // int over R^d of (-c - log|x|)_+ : 2 e^{-c} on the line, pi e^{-2c} / 2 in the plane
    const double a = std::exp(-M), b = std::exp(-M - f.gap);
    acc += t.weight * (d == 1 ? 2.0 * (a - b) : 0.5 * kPi * (a * a - b * b));
  }
  return f.scale * acc;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

}  // namespace

ExponentExperiment run_exponent_experiment(const GraphManifold& m, const std::string& family,
                                           const std::vector<double>& sweep, std::uint64_t seed,
                                           const ExponentOptions& opt) {
  return run_exponent_experiment(m, make_pair_family(family, m, seed, opt.gap), sweep, seed, opt);
}

ExponentExperiment run_exponent_experiment(const GraphManifold& m, const PairFamily& pf,
                                           const std::vector<double>& sweep, std::uint64_t seed,
                                           const ExponentOptions& opt) {
  const int d = m.dim();
  require(d == 1 || d == 2, "exponent", "d must be 1 or 2");
  require(pf.n == d, "exponent", "pair and manifold dimensions differ");
  require(sweep.size() >= 2, "exponent", "sweep needs at least two points");
  for (std::size_t i = 1; i < sweep.size(); ++i)
    require(sweep[i] > sweep[i - 1], "exponent", "sweep levels must increase");
  ExponentExperiment e;
  e.manifold = m.family_name();
  e.family = pf.name;
  e.d = d;
  e.seed = seed;
  e.sweep = sweep;
  e.guarantee = 1.0 / (3.0 * d);
  e.floor = e.guarantee - 0.05;
  e.points.resize(sweep.size());
  // chain radii: supports below the boundary-node spacing are not seen by the disc grids
  const double chain_min = 1.0 / (8.0 * opt.res);

  parallel_for(static_cast<int>(sweep.size()), [&](int i) {
    ExponentPoint& p = e.points[i];
    const double M = sweep[i];
    p.M = M;
    p.x = pair_plane_l1(pf, M, opt.res);
    p.y = pair_trace_integral(pf, m, M, opt.res);
    p.x_closed = plane_closed(pf, M);
    p.y_closed = trace_closed(pf, m, M);

    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(i));
    double order_min = std::numeric_limits<double>::infinity(), order_max = 0.0;
    bool positive_on_k = false;
    auto probe = [&](const cplx* z) {
      const double v = pf.difference(z, M);
      order_min = std::min(order_min, v);
      order_max = std::max(order_max, v);
      return v;
    };
    cplx z[2];
    for (int k = 0; k < 512; ++k) {
      for (int j = 0; j < d; ++j) z[j] = std::polar(2.0 * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
      probe(z);
    }
    for (const auto& t : pf.terms)
      for (int k = 0; k < 64; ++k) {
        for (int j = 0; j < d; ++j)
          z[j] = t.centre[j] + std::polar(2.0 * std::exp(-M) * unit(rng), 2.0 * kPi * unit(rng));
        probe(z);
      }
    for (const auto& t : pf.terms)
      for (int k = 0; k < 128; ++k) {
        double x[2], h[2];
        const auto x0 = foot_of(t);
        for (int j = 0; j < d; ++j) x[j] = x0[j] + 2.0 * std::exp(-M) * (2.0 * unit(rng) - 1.0);
        if (x[0] * x[0] + (d == 2 ? x[1] * x[1] : 0.0) > 1.0) continue;
        m.h(x, h);
        for (int j = 0; j < d; ++j) z[j] = cplx(x[j], h[j]);
        if (probe(z) > 0.0) positive_on_k = true;
      }
    p.order_min = order_min;
    if (order_min < -1e-12)
      fail(ErrorKind::Invariant, "exponent", "phi_1 >= phi_2 fails at M = " + fmt(M));
    if (order_max > 0.0 && p.x <= 0.0)
      fail(ErrorKind::Invariant, "exponent", "plane integral vanishes for a nonzero difference at M = " + fmt(M));
    if (positive_on_k && p.y <= 0.0)
      fail(ErrorKind::Invariant, "exponent", "trace integral vanishes where the difference is positive on K' at M = " + fmt(M));
    p.used = p.x > 0.0 && p.y > 0.0;
    if (opt.chain && std::exp(-M) >= chain_min) p.chain = chain_row(pf, m, M, opt);
  });

  double xmin = std::numeric_limits<double>::infinity(), xmax = 0.0;
  for (const auto& p : e.points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  if (!(xmax > 0.0) || xmax - xmin <= 1e-12 * xmax)
    fail(ErrorKind::Input, "exponent", "degenerate sweep: the difference does not shrink");
  for (std::size_t i = 1; i < e.points.size(); ++i)
    if (!(e.points[i].x < e.points[i - 1].x))
      fail(ErrorKind::Input, "exponent", "sweep must drive the L1 norm down monotonically");

  std::vector<double> xs, ys;
  for (const auto& p : e.points)
    if (p.used) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  e.fit = fit_loglog(xs, ys);
  e.margin = e.fit.slope - e.guarantee;

  e.monotone = true;
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (std::log(ys[i]) - std::log(ys[i - 1]) > e.fit.residual) e.monotone = false;

  constexpr double c = 3.7;
  std::vector<double> cx(xs), cy(ys);
  for (auto& v : cx) v *= c;
  for (auto& v : cy) v *= c;
  e.scale_error = std::abs(fit_loglog(cx, cy).slope - e.fit.slope);

  int skipped = 0;
  for (const auto& p : e.points) {
    if (!p.chain.computed) ++skipped;
    else if (!p.chain.finite()) e.chain_bounded = false;
  }
  const int excluded = static_cast<int>(e.points.size()) - e.fit.points;
  if (excluded > 0) e.note = std::to_string(excluded) + " points with zero trace excluded";
  if (opt.chain && skipped > 0)
    e.note += (e.note.empty() ? "" : "; ") + std::to_string(skipped) + " points below chain resolution";
  e.pass = e.fit.slope >= e.floor && e.monotone && e.scale_error <= 1e-9 && e.chain_bounded;
  return e;
}

std::vector<ExponentSummary> aggregate_report(const std::vector<ExponentExperiment>& experiments) {
  std::vector<ExponentSummary> out;
  for (const auto& e : experiments) {
    ExponentSummary s;
    s.manifold = e.manifold;
    s.family = e.family;
    s.d = e.d;
    s.slope = e.fit.slope;
    s.residual = e.fit.residual;
    s.guarantee = 1.0 / (3.0 * e.d);
    s.margin = s.slope - s.guarantee;
    s.pass = e.pass;
    out.push_back(s);
  }
  return out;
}

}  // namespace crd
