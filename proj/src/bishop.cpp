#include "crdisc/bishop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crdisc/errors.hpp"

namespace crd {

std::vector<double> DiscParams::tau1_star() const {
  std::vector<double> v{1.0};
  v.insert(v.end(), tau1.begin(), tau1.end());
  return v;
}

std::vector<double> DiscParams::tau2_star() const {
  std::vector<double> v{0.0};
  v.insert(v.end(), tau2.begin(), tau2.end());
  return v;
}

void DiscParams::validate(int d) const {
  require(static_cast<int>(tau1.size()) == d - 1 && static_cast<int>(tau2.size()) == d - 1, "bishop",
          "tau1 and tau2 must have d-1 components");
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  require(norm(tau1) <= 1.0 + 1e-12 && norm(tau2) <= 1.0 + 1e-12, "bishop", "tau must lie in the closed unit ball");
  require(t > 0.0 && t < 1.0, "bishop", "t must lie in (0, 1)");
}

BishopProblem::BishopProblem(GraphManifold m, SeedFunction seed, int modes)
    : m_(std::move(m)), seed_(std::move(seed)), modes_(modes), grid_(4 * modes) {
  require(modes >= 8, "bishop", "need at least 8 modes");
  u0_ = seed_.u0.resized(modes);
  t1u0_ = t1_transform(u0_);
}

std::vector<BoundaryFunction> BishopProblem::linear_part(const DiscParams& p) const {
  const int d = m_.dim();
  auto a = p.tau1_star();
  auto b = p.tau2_star();
  std::vector<BoundaryFunction> U;
  U.reserve(d);
  for (int j = 0; j < d; ++j) {
    BoundaryFunction f = (-p.t * a[j]) * t1u0_;
    f.add_constant(p.t * b[j]);
    U.push_back(std::move(f));
  }
  return U;
}

std::vector<BoundaryFunction> BishopProblem::h_of(const std::vector<BoundaryFunction>& U, const DiscParams& p,
                                                  int grid) const {
  const int d = m_.dim();
  std::vector<std::vector<double>> vals(d);
  for (int j = 0; j < d; ++j) vals[j] = synthesize(U[j], grid);
  std::vector<std::vector<double>> hv(d, std::vector<double>(grid));
  double x[4], out[4];
  const cplx* z2 = p.z2.empty() ? nullptr : p.z2.data();
  for (int i = 0; i < grid; ++i) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] = vals[j][i];
      r2 += x[j] * x[j];
    }
    if (r2 > 1.0) {
      std::ostringstream os;
      os << "iterate left the unit ball: |U| = " << std::sqrt(r2) << " at theta = " << 2.0 * kPi * i / grid
         << " (t = " << p.t << ")";
      fail(ErrorKind::DomainEscape, "bishop", os.str());
    }
    m_.h(x, out, z2);
    for (int j = 0; j < d; ++j) hv[j][i] = out[j];
  }
  std::vector<BoundaryFunction> H;
  H.reserve(d);
  for (int j = 0; j < d; ++j) H.push_back(analyze(hv[j], modes_));
  return H;
}

std::vector<BoundaryFunction> BishopProblem::rhs(const std::vector<BoundaryFunction>& U, const DiscParams& p,
                                                 int grid) const {
  auto lin = linear_part(p);
  if (m_.family() == ManifoldFamily::Zero) {
    const double r = sup_norm(U, grid);
    if (r > 1.0) {
      std::ostringstream os;
      os << "iterate left the unit ball: |U| = " << r << " (t = " << p.t << ")";
      fail(ErrorKind::DomainEscape, "bishop", os.str());
    }
    return lin;
  }
  auto H = h_of(U, p, grid);
  for (std::size_t j = 0; j < lin.size(); ++j) lin[j] -= t1_transform(H[j]);
  return lin;
}

double sup_norm(const std::vector<BoundaryFunction>& U, int grid) {
  std::vector<std::vector<double>> v;
  for (const auto& f : U) v.push_back(synthesize(f, grid));
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    double s = 0.0;
    for (const auto& row : v) s += row[i] * row[i];
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

double BishopProblem::defect(const std::vector<BoundaryFunction>& U, const DiscParams& p, int grid) const {
  auto G = rhs(U, p, grid);
  std::vector<BoundaryFunction> diff;
  for (std::size_t j = 0; j < U.size(); ++j) diff.push_back(G[j] - U[j]);
  return sup_norm(diff, grid);
}

BishopSolution BishopProblem::solve(const DiscParams& p, const SolverOptions& opt,
                                    const std::vector<BoundaryFunction>* initial) const {
  const int d = m_.dim();
  p.validate(d);
  require(m_.zdim() == 0 || static_cast<int>(p.z2.size()) == m_.zdim(), "bishop", "z2 parameter size mismatch");
  require(opt.relaxation > 0.0 && opt.relaxation <= 1.0, "bishop", "relaxation must lie in (0, 1]");
  std::vector<BoundaryFunction> U;
  if (initial) {
    require(static_cast<int>(initial->size()) == d, "bishop", "initial guess has wrong dimension");
    for (const auto& f : *initial) U.push_back(f.resized(modes_));
  } else {
    U = linear_part(p);
  }
  BishopSolution sol;
  sol.params = p;
  int rising = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    auto G = rhs(U, p, grid_);
    std::vector<BoundaryFunction> diff;
    for (int j = 0; j < d; ++j) diff.push_back(G[j] - U[j]);
    const double def = sup_norm(diff, grid_);
    if (!sol.defects.empty() && def >= sol.defects.back()) {
      if (++rising >= opt.window) {
        std::ostringstream os;
        os << "defect stopped decreasing (" << def << " after " << it << " iterations, t = " << p.t << ")";
        fail(ErrorKind::Contraction, "bishop", os.str());
      }
    } else {
      rising = 0;
    }
    sol.defects.push_back(def);
    if (def <= opt.tol) {
      sol.U = std::move(U);
      sol.residual = def;
      sol.iterations = it;
      const auto& ds = sol.defects;
      if (ds.size() >= 3) {
        // geometric-mean ratio over the decreasing run, skipping the first step
        double a = ds[1], b = ds[ds.size() - 2];
        int n = static_cast<int>(ds.size()) - 3;
        sol.contraction = (n > 0 && a > 0.0 && b > 0.0) ? std::pow(b / a, 1.0 / n) : 0.0;
      } else if (ds.size() == 2 && ds[0] > 0.0) {
        sol.contraction = ds[1] / ds[0];
      }
      return sol;
    }
    for (int j = 0; j < d; ++j) {
      if (opt.relaxation == 1.0) {
        U[j] = G[j];
      } else {
        U[j] = (1.0 - opt.relaxation) * U[j] + opt.relaxation * G[j];
      }
    }
  }
  std::ostringstream os;
  os << "no convergence within " << opt.max_iter << " iterations (last defect " << sol.defects.back()
     << ", t = " << p.t << ")";
  fail(ErrorKind::Contraction, "bishop", os.str());
}

std::vector<BishopSolution> solve_bishop_parametrized(const BishopProblem& prob, const DiscParams& p,
                                                      const std::vector<std::vector<cplx>>& z2_grid,
                                                      const SolverOptions& opt) {
  std::vector<BishopSolution> out;
  out.reserve(z2_grid.size());
  for (const auto& z2 : z2_grid) {
    DiscParams q = p;
    q.z2 = z2;
    try {
      out.push_back(prob.solve(q, opt));
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " [z2 =";
      for (const auto& v : z2) os << " (" << v.real() << "," << v.imag() << ")";
      os << "]";
      throw Error(e.kind(), "bishop", os.str());
    }
  }
  return out;
}

std::vector<DiscParams> reference_params(int d, double t) {
  std::vector<DiscParams> out;
  if (d == 1) {
    DiscParams p;
    p.t = t;
    out.push_back(p);
    return out;
  }
  const int n = d - 1;
  std::vector<std::vector<double>> pts{std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i)
    for (double s : {-1.0, 1.0}) {
      std::vector<double> v(n, 0.0);
      v[i] = s;
      pts.push_back(v);
    }
  for (const auto& a : pts)
    for (const auto& b : pts) {
      DiscParams p;
      p.tau1 = a;
      p.tau2 = b;
      p.t = t;
      out.push_back(p);
    }
  return out;
}

TmaxResult find_t_max(const BishopProblem& prob, const SolverOptions& opt, double cap, int steps) {
  auto ok = [&](double t) {
    for (auto p : reference_params(prob.manifold().dim(), t)) {
      if (prob.manifold().zdim() > 0) p.z2.assign(prob.manifold().zdim(), cplx(0.0, 0.0));
      try {
        prob.solve(p, opt);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Contraction || e.kind() == ErrorKind::DomainEscape ||
            e.kind() == ErrorKind::Domain)
          return false;
        throw;
      }
    }
    return true;
  };
  TmaxResult r;
  if (ok(cap)) {
    r.t_max = cap;
    return r;
  }
  double lo = 0.0, hi = cap;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++r.steps;
  }
  r.t_max = lo;
  return r;
}

SolutionStencil build_stencil(const BishopProblem& prob, const DiscParams& p, int order, double delta,
                              const SolverOptions& opt) {
  require(order >= 0 && order <= 2, "bishop", "stencil order must be 0, 1 or 2");
  require(delta > 0.0, "bishop", "stencil step must be positive");
  const int d = prob.manifold().dim();
  SolutionStencil s;
  s.order = order;
  s.delta = delta;
  s.center = prob.solve(p, opt);
  const int n = 2 * (d - 1);
  auto shifted = [&](int i, double h) {
    DiscParams q = p;
    if (i < d - 1) {
      q.tau1[i] += h;
    } else {
      q.tau2[i - (d - 1)] += h;
    }
    return q;
  };
  if (order >= 1) {
    for (int i = 0; i < n; ++i) {
      s.plus.push_back(prob.solve(shifted(i, delta), opt));
      s.minus.push_back(prob.solve(shifted(i, -delta), opt));
    }
  }
  if (order >= 2) {
    s.mixed.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        for (double a : {delta, -delta})
          for (double b : {delta, -delta}) {
            DiscParams q = shifted(i, a);
            if (j < d - 1) {
              q.tau1[j] += b;
            } else {
              q.tau2[j - (d - 1)] += b;
            }
            s.mixed[i * n + j].push_back(prob.solve(q, opt));
          }
      }
  }
  return s;
}

namespace {

using Vec = std::vector<BoundaryFunction>;

Vec combine(std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out;
  for (const auto& [w, v] : terms) {
    if (out.empty()) {
      for (const auto& f : *v) out.push_back(w * f);
    } else {
      for (std::size_t j = 0; j < v->size(); ++j) out[j] += w * (*v)[j];
    }
  }
  return out;
}

Vec dtheta(const Vec& v, int order) {
  Vec out;
  for (const auto& f : v) out.push_back(f.derivative(order));
  return out;
}

double norm_half(const Vec& v, int grid) {
  double best = 0.0;
  for (const auto& f : v) best = std::max(best, holder_norm(f, 0.5, grid));
  return best;
}

}  // namespace

double solution_holder_report(const SolutionStencil& s, int order, int grid) {
  require(order >= 0 && order <= 2, "bishop", "differentiation order must be 0, 1 or 2");
  if (order > s.order) fail(ErrorKind::Input, "bishop", "stencil lacks the neighbouring solves for this order");
  const Vec& u = s.center.U;
  const int n = static_cast<int>(s.plus.size());
  const double h = s.delta;
  std::vector<Vec> family;
  if (order == 0) family.push_back(u);
  if (order == 1) {
    family.push_back(dtheta(u, 1));
    for (int i = 0; i < n; ++i)
      family.push_back(combine({{0.5 / h, &s.plus[i].U}, {-0.5 / h, &s.minus[i].U}}));
  }
  if (order == 2) {
    family.push_back(dtheta(u, 2));
    for (int i = 0; i < n; ++i) {
      Vec di = combine({{0.5 / h, &s.plus[i].U}, {-0.5 / h, &s.minus[i].U}});
      family.push_back(dtheta(di, 1));
      family.push_back(combine({{1.0 / (h * h), &s.plus[i].U}, {-2.0 / (h * h), &u}, {1.0 / (h * h), &s.minus[i].U}}));
      for (int j = i + 1; j < n; ++j) {
        const auto& m = s.mixed[i * n + j];
        const double w = 0.25 / (h * h);
        family.push_back(combine({{w, &m[0].U}, {-w, &m[1].U}, {-w, &m[2].U}, {w, &m[3].U}}));
      }
    }
  }
  double best = 0.0;
  for (const auto& v : family) best = std::max(best, norm_half(v, grid));
  return best;
}

}  // namespace crd
