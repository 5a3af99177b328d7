#include "crdisc/family.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "crdisc/conformal.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/parallel.hpp"

namespace crd {

DiscMember::DiscMember(const BishopProblem& prob, BishopSolution sol) : sol_(std::move(sol)) {
  const int d = prob.manifold().dim();
  P_ = prob.h_of(sol_.U, sol_.params, prob.grid());
  const auto a = sol_.params.tau1_star();
  for (int j = 0; j < d; ++j) {
    re_.push_back(sol_.U[j]);
    im_.push_back(P_[j] + (sol_.params.t * a[j]) * prob.u0());
    a_.push_back(cauchy_transform(re_[j]));
    b_.push_back(cauchy_transform(im_[j]));
  }
}

void DiscMember::eval(cplx z, cplx* out) const {
  for (int j = 0; j < dim(); ++j) out[j] = cplx(a_[j](z).real(), b_[j](z).real());
}

void DiscMember::gradient(cplx z, cplx* out_x, cplx* out_y) const {
  for (int j = 0; j < dim(); ++j) {
    const cplx da = a_[j].derivative(z), db = b_[j].derivative(z);
    out_x[j] = cplx(da.real(), db.real());
    out_y[j] = cplx(-da.imag(), -db.imag());
  }
}

std::vector<std::vector<std::vector<cplx>>> DiscMember::polar_grid(std::span<const double> radii,
                                                                   int n_theta) const {
  std::vector<std::vector<std::vector<cplx>>> out(dim());
  for (int j = 0; j < dim(); ++j) {
    auto r = HarmonicField(re_[j]).polar_grid(radii, n_theta);
    auto i = HarmonicField(im_[j]).polar_grid(radii, n_theta);
    out[j].resize(radii.size(), std::vector<cplx>(n_theta));
    for (std::size_t a = 0; a < radii.size(); ++a)
      for (int k = 0; k < n_theta; ++k) out[j][a][k] = cplx(r[a][k], i[a][k]);
  }
  return out;
}

double DiscMember::truncation_error() const {
  double s = 0.0;
  for (int j = 0; j < dim(); ++j) s += re_[j].truncation_error() + im_[j].truncation_error();
  return s;
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> tau_grid(int d, int nodes, double extent) {
  using Pt = std::vector<double>;
  std::vector<std::pair<Pt, Pt>> out;
  if (d == 1) {
    out.push_back({{}, {}});
    return out;
  }
  require(nodes >= 1, "family", "tau grid needs at least one node per axis");
  require(extent >= 0.0 && extent < 1.0, "family", "tau extent must lie in [0, 1)");
  const int n = d - 1;
  std::vector<double> axis(nodes);
  for (int i = 0; i < nodes; ++i) axis[i] = nodes == 1 ? 0.0 : -extent + 2.0 * extent * i / (nodes - 1);
  // all points of axis^n for one ball, dropping those outside radius extent
  std::vector<Pt> ball;
  std::vector<int> idx(n, 0);
  while (true) {
    Pt p(n);
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) {
      p[k] = axis[idx[k]];
      r2 += p[k] * p[k];
    }
    if (n == 1 || r2 <= extent * extent + 1e-12) ball.push_back(p);
    int k = 0;
    while (k < n && ++idx[k] == nodes) idx[k++] = 0;
    if (k == n) break;
  }
  for (const auto& a : ball)
    for (const auto& b : ball) out.push_back({a, b});
  return out;
}

DiscFamily::DiscFamily(std::shared_ptr<const BishopProblem> prob, const FamilyOptions& opt)
    : prob_(std::move(prob)), opt_(opt) {
  require(prob_ != nullptr, "family", "null problem");
  const auto grid = tau_grid(dim(), opt_.tau_nodes, opt_.tau_extent);
  std::vector<std::optional<DiscMember>> slots(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    try {
      slots[i].emplace(member(grid[i].first, grid[i].second));
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " [tau node " << i << "]";
      throw Error(e.kind(), "family", os.str());
    }
  });
  for (auto& s : slots) members_.push_back(std::move(*s));
}

DiscParams DiscFamily::params_for(const std::vector<double>& tau1, const std::vector<double>& tau2) const {
  DiscParams p;
  p.tau1 = tau1;
  p.tau2 = tau2;
  p.t = opt_.t;
  if (prob_->manifold().zdim() > 0) p.z2.assign(prob_->manifold().zdim(), cplx(0.0, 0.0));
  return p;
}

DiscMember DiscFamily::member(const std::vector<double>& tau1, const std::vector<double>& tau2) const {
  return DiscMember(*prob_, prob_->solve(params_for(tau1, tau2), opt_.solver));
}

void DiscFamily::eval(const DiscMember& m, cplx z, cplx* out) const {
  m.eval(phi_ ? (*phi_)(z) : z, out);
}

void DiscFamily::gradient(const DiscMember& m, cplx z, cplx* out_x, cplx* out_y) const {
  if (!phi_) {
    m.gradient(z, out_x, out_y);
    return;
  }
  const int d = dim();
  std::vector<cplx> gx(d), gy(d);
  m.gradient((*phi_)(z), gx.data(), gy.data());
  const cplx dphi = phi_->derivative(z);
  for (int j = 0; j < d; ++j) {
    // real chain rule, so a non-holomorphic F still shows up in the CR residual
    out_x[j] = gx[j] * dphi.real() + gy[j] * dphi.imag();
    out_y[j] = -gx[j] * dphi.imag() + gy[j] * dphi.real();
  }
}

DiscFamily DiscFamily::reparametrized(std::shared_ptr<const ConformalMap> phi) const {
  DiscFamily f = *this;
  f.phi_ = std::move(phi);
  return f;
}

double DiscFamily::truncation_error() const {
  double best = 0.0;
  for (const auto& m : members_) best = std::max(best, m.truncation_error());
  return best;
}

DiscFamily build_family(std::shared_ptr<const BishopProblem> prob, const FamilyOptions& opt) {
  require(opt.t > 0.0 && opt.t < 1.0, "family", "t must lie in (0, 1)");
  return DiscFamily(std::move(prob), opt);
}

JacobianContext::JacobianContext(const DiscFamily& fam, const std::vector<double>& tau1,
                                 const std::vector<double>& tau2, double fd_step)
    : fam_(&fam), center_(fam.member(tau1, tau2)), step_(fd_step) {
  require(fd_step > 1e-9, "family", "finite-difference step underflow");
  const int d = fam.dim();
  const auto& prob = fam.problem();
  for (int i = 0; i < 2 * (d - 1); ++i) {
    for (double s : {1.0, -1.0}) {
      auto a = tau1, b = tau2;
      if (i < d - 1) {
        a[i] += s * fd_step;
      } else {
        b[i - (d - 1)] += s * fd_step;
      }
      auto sol = prob.solve(fam.params_for(a, b), fam.options().solver, &center_.solution().U);
      (s > 0 ? plus_ : minus_).emplace_back(prob, std::move(sol));
    }
  }
}

double JacobianContext::det(cplx z) const {
  const int d = fam_->dim();
  const int n = 2 * d;
  Eigen::MatrixXd J(n, n);
  std::vector<cplx> gx(d), gy(d), fp(d), fm(d);
  fam_->gradient(center_, z, gx.data(), gy.data());
  for (int j = 0; j < d; ++j) {
    J(2 * j, 0) = gx[j].real();
    J(2 * j + 1, 0) = gx[j].imag();
    J(2 * j, 1) = gy[j].real();
    J(2 * j + 1, 1) = gy[j].imag();
  }
  for (std::size_t c = 0; c < plus_.size(); ++c) {
    fam_->eval(plus_[c], z, fp.data());
    fam_->eval(minus_[c], z, fm.data());
    for (int j = 0; j < d; ++j) {
      const cplx v = (fp[j] - fm[j]) / (2.0 * step_);
      J(2 * j, 2 + c) = v.real();
      J(2 * j + 1, 2 + c) = v.imag();
    }
  }
  return J.determinant();
}

JacobianValue jacobian(const DiscFamily& fam, cplx z, const std::vector<double>& tau1,
                       const std::vector<double>& tau2, double fd_step) {
  require(std::abs(z) < 1.0, "family", "jacobian needs an interior point");
  JacobianValue v;
  v.value = JacobianContext(fam, tau1, tau2, fd_step).det(z);
  v.half_step_value = fam.dim() == 1 ? v.value : JacobianContext(fam, tau1, tau2, 0.5 * fd_step).det(z);
  v.rel_change = v.value == 0.0 ? 0.0 : std::abs(v.half_step_value - v.value) / std::abs(v.value);
  return v;
}

std::vector<cplx> RegionGrid::points() const {
  require(r0 > 0.0 && r0 < 1.0 && s_min > 0.0 && s_min < 0.9 * r0, "family", "bad region grid");
  require(n_s >= 2 && n_theta >= 1, "family", "region grid too small");
  std::vector<cplx> out;
  const double s_max = 0.9 * r0;
  for (int i = 0; i < n_s; ++i) {
    const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) / (n_s - 1));
    const double r = 1.0 - s;
    const double c = std::clamp((r * r + 1.0 - r0 * r0) / (2.0 * r), -1.0, 1.0);
    const double th_max = 0.95 * std::acos(c);
    for (int k = 0; k < n_theta; ++k) {
      const double th = n_theta == 1 ? 0.0 : -th_max + 2.0 * th_max * k / (n_theta - 1);
      out.push_back(std::polar(r, th));
    }
  }
  return out;
}

namespace {

void fold(RatioRange& r, double v, cplx z) {
  if (r.count == 0 || v < r.min) {
    r.min = v;
    r.argmin = z;
  }
  if (r.count == 0 || v > r.max) {
    r.max = v;
    r.argmax = z;
  }
  ++r.count;
}

}  // namespace

RatioRange verify_jacobian_bound(const DiscFamily& fam, const RegionGrid& region, double fd_step) {
  const auto pts = region.points();
  const int d = fam.dim();
  const auto grid = tau_grid(d, fam.options().tau_nodes, fam.options().tau_extent);
  const double norm = std::pow(fam.t(), 2 * d);
  std::vector<std::vector<double>> vals(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int g) {
    JacobianContext ctx(fam, grid[g].first, grid[g].second, fd_step);
    for (const auto& z : pts) {
      const double s = 1.0 - std::abs(z);
      vals[g].push_back(std::abs(ctx.det(z)) / (norm * std::pow(s, d - 1)));
    }
  });
  RatioRange r;
  for (const auto& row : vals)
    for (std::size_t i = 0; i < pts.size(); ++i) fold(r, row[i], pts[i]);
  return r;
}

RatioRange verify_distance_bounds(const DiscFamily& fam, const RegionGrid& region) {
  const auto pts = region.points();
  const int d = fam.dim();
  const auto& members = fam.members();
  std::vector<std::vector<double>> vals(members.size());
  parallel_for(static_cast<int>(members.size()), [&](int g) {
    std::vector<cplx> f(d);
    for (const auto& z : pts) {
      fam.eval(members[g], z, f.data());
      vals[g].push_back(surrogate_distance(fam.problem().manifold(), f) / (fam.t() * (1.0 - std::abs(z))));
    }
  });
  RatioRange r;
  for (const auto& row : vals)
    for (std::size_t i = 0; i < pts.size(); ++i) fold(r, row[i], pts[i]);
  return r;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "family", "fit needs matching x and y");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  SlopeFit f;
  f.points = static_cast<int>(lx.size());
  if (f.points < 2) fail(ErrorKind::Numerical, "family", "fewer than two positive points for a log-log fit");
  double mx = 0, my = 0;
  for (int i = 0; i < f.points; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= f.points;
  my /= f.points;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::Numerical, "family", "degenerate log-log fit (constant x)");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (int i = 0; i < f.points; ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / f.points);
  return f;
}

SlopeFit degeneration_slope(const DiscFamily& fam, double s_min, double s_max, int n, double fd_step) {
  require(s_min > 0.0 && s_max > s_min && s_max < 1.0 && n >= 2, "family", "bad degeneration sweep");
  const int d = fam.dim();
  JacobianContext ctx(fam, std::vector<double>(d - 1, 0.0), std::vector<double>(d - 1, 0.0), fd_step);
  std::vector<double> xs, ys;
  for (int i = 0; i < n; ++i) {
    const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) / (n - 1));
    xs.push_back(s);
    ys.push_back(std::abs(ctx.det(cplx(1.0 - s, 0.0))));
  }
  return fit_loglog(xs, ys);
}

AttachmentReport verify_attachment(const DiscFamily& fam, int n_theta) {
  require(n_theta >= 2, "family", "attachment mesh too small");
  const double arc = fam.problem().seed().theta_u0;
  const int d = fam.dim();
  AttachmentReport rep;
  std::vector<cplx> f(d);
  for (const auto& m : fam.members()) {
    rep.truncation = std::max(rep.truncation, m.truncation_error());
    for (int k = 0; k < n_theta; ++k) {
      const double th = -arc + 2.0 * arc * k / (n_theta - 1);
      cplx z = std::polar(1.0, th);
      if (fam.reparametrized()) {
        const cplx w = (*fam.reparam())(z);
        if (std::abs(w) < 1.0 - 1e-10 || std::abs(std::arg(w)) > arc) continue;
      }
      fam.eval(m, z, f.data());
      rep.residual = std::max(rep.residual, surrogate_distance(fam.problem().manifold(), f));
      ++rep.points;
    }
  }
  return rep;
}

double cauchy_riemann_residual(const DiscFamily& fam, int n_r, int n_theta) {
  const int d = fam.dim();
  std::vector<cplx> gx(d), gy(d);
  double best = 0.0;
  for (const auto& m : fam.members())
    for (int i = 0; i < n_r; ++i) {
      const double r = 0.9 * (i + 1) / n_r;
      for (int k = 0; k < n_theta; ++k) {
        fam.gradient(m, std::polar(r, 2.0 * kPi * k / n_theta), gx.data(), gy.data());
        for (int j = 0; j < d; ++j) best = std::max(best, std::abs(gy[j] - cplx(0.0, 1.0) * gx[j]));
      }
    }
  return best;
}

CoverageReport boundary_coverage(const DiscFamily& fam, const std::vector<double>& tau1, int n_theta,
                                 int n_tau2) {
  const int d = fam.dim();
  require(static_cast<int>(tau1.size()) == d - 1, "family", "tau1 has wrong dimension");
  require(n_theta >= 3 && (d == 1 || n_tau2 >= 2), "family", "coverage mesh too small");
  const double arc = fam.problem().seed().theta_u0;
  const double t = fam.t();
  // tau2 mesh: axis^(d-1) restricted to the ball of radius 1 - margin
  const double ext = 0.95;
  std::vector<std::vector<double>> tau2s;
  if (d == 1) {
    tau2s.push_back({});
  } else {
    const auto g = tau_grid(d, n_tau2, ext);
    for (const auto& p : g)
      if (p.first == g.front().first) tau2s.push_back(p.second);
  }
  const double dth = 2.0 * arc / (n_theta - 1);
  const double dtau = d == 1 ? dth : 2.0 * ext / (n_tau2 - 1);
  CoverageReport rep;
  rep.collision_tol = 0.05 * t * std::min(dth, dtau);
  std::vector<std::vector<std::vector<double>>> rows(tau2s.size());
  parallel_for(static_cast<int>(tau2s.size()), [&](int g) {
    DiscMember m = fam.member(tau1, tau2s[g]);
    std::vector<cplx> f(d);
    for (int k = 0; k < n_theta; ++k) {
      fam.eval(m, std::polar(1.0, -arc + dth * k), f.data());
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j) x[j] = f[j].real();
      rows[g].push_back(std::move(x));
    }
  });
  // parameter coordinates (theta, tau2) of each mesh node, to find mesh neighbours
  std::vector<std::vector<double>> param;
  for (std::size_t g = 0; g < rows.size(); ++g)
    for (int k = 0; k < n_theta; ++k) {
      std::vector<double> q{-arc + dth * k};
      q.insert(q.end(), tau2s[g].begin(), tau2s[g].end());
      param.push_back(std::move(q));
      rep.image.push_back(std::move(rows[g][k]));
    }
  const int n = static_cast<int>(rep.image.size());
  rep.mesh_points = n;
  if (n < 2) fail(ErrorKind::Coverage, "family", "coverage mesh degenerate");
  auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
  };
  auto adjacent = [&](int i, int k) {
    int steps = 0;
    for (int j = 0; j < d; ++j) {
      const double e = std::abs(param[i][j] - param[k][j]);
      const double h = j == 0 ? dth : dtau;
      if (std::abs(e - h) < 1e-9 * h) {
        ++steps;
      } else if (e > 1e-9 * h) {
        return false;
      }
    }
    return steps == 1;
  };
  // resolution: longest image edge between mesh neighbours
  rep.min_pair_distance = 1e300;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double e = dist(rep.image[i], rep.image[k]);
      rep.min_pair_distance = std::min(rep.min_pair_distance, e);
      if (adjacent(i, k)) rep.resolution = std::max(rep.resolution, e);
    }
  rep.injective = rep.min_pair_distance > rep.collision_tol;
  if (rep.resolution <= 0.0) fail(ErrorKind::Coverage, "family", "coverage mesh degenerate");

  // covering radius of B_d(0, r) by the image, probed on a lattice of spacing resolution/4
  auto covering = [&](double r) {
    const double h = rep.resolution / 4.0;
    const int m = static_cast<int>(std::ceil(r / h));
    double worst = 0.0;
    std::vector<int> idx(d, -m);
    std::vector<double> p(d);
    while (true) {
      double r2 = 0.0;
      for (int j = 0; j < d; ++j) {
        p[j] = idx[j] * h;
        r2 += p[j] * p[j];
      }
      if (r2 <= r * r) {
        double best = 1e300;
        for (const auto& q : rep.image) best = std::min(best, dist(p, q));
        worst = std::max(worst, best);
      }
      int j = 0;
      while (j < d && ++idx[j] > m) idx[j++] = -m;
      if (j == d) break;
    }
    return worst;
  };
  double lo = 0.0, hi = t;
  if (covering(hi) <= rep.resolution) {
    lo = hi;
  } else {
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (covering(mid) <= rep.resolution) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  rep.radius = lo;
  rep.covering_radius = covering(lo);
  rep.eps_hat = lo / t;
  return rep;
}

}  // namespace crd
