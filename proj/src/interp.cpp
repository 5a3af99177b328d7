#include "crdisc/interp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "crdisc/errors.hpp"
#include "crdisc/seed.hpp"

namespace crd {

int GridFunction::interface_row() const {
  const double j = -y0 / h;
  const int r = static_cast<int>(std::lround(j));
  if (std::abs(j - r) > 1e-9 || r < 0 || r >= ny) return -1;
  return r;
}

double GridFunction::sup() const {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

GridFunction GridFunction::sample(const std::function<double(double, double)>& f, double x0, double y0,
                                  double h, int nx, int ny) {
  require(nx >= 1 && ny >= 1 && h > 0.0, "interp", "bad grid");
  GridFunction g;
  g.x0 = x0;
  g.y0 = y0;
  g.h = h;
  g.nx = nx;
  g.ny = ny;
  g.v.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g.at(i, j) = f(g.x(i), g.y(j));
  return g;
}

namespace {

// first derivative along one axis, second order, one-sided at the ends
GridFunction d1(const GridFunction& g, bool along_x) {
  GridFunction o = g;
  const int n = along_x ? g.nx : g.ny;
  require(n >= 3, "interp", "need three nodes to differentiate");
  const double h = g.h;
  const int m = along_x ? g.ny : g.nx;
  for (int a = 0; a < m; ++a) {
    auto val = [&](int k) { return along_x ? g.at(k, a) : g.at(a, k); };
    auto set = [&](int k, double x) {
      if (along_x) {
        o.at(k, a) = x;
      } else {
        o.at(a, k) = x;
      }
    };
    set(0, (-3.0 * val(0) + 4.0 * val(1) - val(2)) / (2.0 * h));
    for (int k = 1; k < n - 1; ++k) set(k, (val(k + 1) - val(k - 1)) / (2.0 * h));
    set(n - 1, (3.0 * val(n - 1) - 4.0 * val(n - 2) + val(n - 3)) / (2.0 * h));
  }
  return o;
}

struct Offset {
  int p, q;
  double len;
};

std::vector<Offset> offsets(const GridFunction& g) {
  std::vector<Offset> out;
  const int lmax = static_cast<int>(std::floor(1.0 / g.h + 1e-9));
  auto add = [&](int p, int q) {
    const double len = g.h * std::hypot(p, q);
    if (len >= g.h * (1 - 1e-12) && len <= 1.0 + 1e-12) out.push_back({p, q, len});
  };
  if (g.one_dimensional()) {
    for (int p = 1; p <= std::min(6, lmax); ++p) add(p, 0);
    for (int p = 8; p <= lmax; p *= 2) add(p, 0);
    return out;
  }
  for (int q = 0; q <= 6; ++q)
    for (int p = -6; p <= 6; ++p) {
      if (q == 0 && p <= 0) continue;
      if (p * p + q * q <= 36) add(p, q);
    }
  const int dirs[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  for (int m = 8; m <= lmax; m *= 2)
    for (const auto& d : dirs) add(m * d[0], m * d[1]);
  return out;
}

double sup_masked(const GridFunction& g, const std::vector<char>* mask) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.v.size(); ++k)
    if (!mask || (*mask)[k]) s = std::max(s, std::abs(g.v[k]));
  return s;
}

double seminorm(const GridFunction& g, double beta, const std::vector<char>* mask) {
  double best = 0.0;
  for (const auto& o : offsets(g)) {
    const double w = std::pow(o.len, -beta);
    for (int j = std::max(0, -o.q); j < g.ny && j + o.q < g.ny; ++j)
      for (int i = std::max(0, -o.p); i < g.nx && i + o.p < g.nx; ++i) {
        const std::size_t a = static_cast<std::size_t>(j) * g.nx + i;
        const std::size_t b = static_cast<std::size_t>(j + o.q) * g.nx + (i + o.p);
        if (mask && (!(*mask)[a] || !(*mask)[b])) continue;
        best = std::max(best, std::abs(g.v[b] - g.v[a]) * w);
      }
  }
  return best;
}

}  // namespace

GridFunction partial(const GridFunction& g, int ax, int ay) {
  require(ax >= 0 && ay >= 0, "interp", "negative derivative order");
  require(!g.one_dimensional() || ay == 0, "interp", "no y derivative of a one-dimensional function");
  GridFunction o = g;
  for (int k = 0; k < ax; ++k) o = d1(o, true);
  for (int k = 0; k < ay; ++k) o = d1(o, false);
  return o;
}

double holder_norm_grid(const GridFunction& g, double t, const std::vector<char>* mask) {
  require(t >= 0.0, "interp", "negative regularity index");
  require(!mask || mask->size() == g.v.size(), "interp", "mask size mismatch");
  const int k = static_cast<int>(std::floor(t + 1e-12));
  const double beta = t - k;
  double norm = 0.0;
  std::vector<GridFunction> top;
  for (int j = 0; j <= k; ++j) {
    double s = 0.0;
    for (int ax = j; ax >= 0; --ax) {
      const int ay = j - ax;
      if (g.one_dimensional() && ay > 0) continue;
      GridFunction d = partial(g, ax, ay);
      s = std::max(s, sup_masked(d, mask));
      if (j == k && beta > 1e-12) top.push_back(std::move(d));
    }
    norm += s;
  }
  double semi = 0.0;
  for (const auto& d : top) semi = std::max(semi, seminorm(d, beta, mask));
  return norm + semi;
}

double delta_seminorm(const GridFunction& g, double alpha, int l) {
  require(alpha > 0.0 && alpha < 1.0, "interp", "alpha must lie in (0, 1)");
  require(l >= 1, "interp", "difference order must be positive");
  double best = 0.0;
  for (const auto& o : offsets(g)) {
    const double w = std::pow(o.len, -alpha);
    for (int j = std::max(0, -l * o.q); j < g.ny && j + l * o.q < g.ny; ++j)
      for (int i = std::max(0, -l * o.p); i < g.nx && i + l * o.p < g.nx; ++i) {
        // sum_m (-1)^{l-m} C(l, m) g(x + m h)
        double s = 0.0, c = 1.0;
        for (int m = 0; m <= l; ++m) {
          const double sign = ((l - m) % 2 == 0) ? 1.0 : -1.0;
          s += sign * c * g.at(i + m * o.p, j + m * o.q);
          c = c * (l - m) / (m + 1);
        }
        best = std::max(best, std::abs(s) * w);
      }
  }
  return g.sup() + best;
}

std::vector<double> reflection_coefficients(int k) {
  require(k >= 0 && k <= 12, "interp", "reflection order out of range");
  const int n = k + 1;
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  for (int l = 0; l < n; ++l)
    for (int c = 0; c < n; ++c) A(l, c) = std::pow(-(c + 1.0), l);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) fail(ErrorKind::Numerical, "interp", "reflection Vandermonde system is singular");
  Eigen::VectorXd a = lu.solve(b);
  return std::vector<double>(a.data(), a.data() + n);
}

double moment_residual(const std::vector<double>& a) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += std::pow(-(c + 1.0), static_cast<double>(l)) * a[c];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

GridFunction reflect_extend(const GridFunction& f, double t) {
  require(!f.one_dimensional(), "interp", "reflection needs a two-dimensional grid");
  require(f.interface_row() == 0, "interp", "reflection expects the interface y = 0 as the first row");
  require(t >= 0.0, "interp", "negative regularity index");
  const int k = static_cast<int>(std::floor(t + 1e-12));
  const auto a = reflection_coefficients(k);
  const int J = (f.ny - 1) / (k + 1);
  require(J >= 1, "interp", "grid too short to reflect");
  GridFunction e;
  e.x0 = f.x0;
  e.h = f.h;
  e.nx = f.nx;
  e.ny = f.ny + J;
  e.y0 = -J * f.h;
  e.t = f.t;
  e.vanishing = f.vanishing;
  e.v.resize(static_cast<std::size_t>(e.nx) * e.ny);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) e.at(i, j + J) = f.at(i, j);
  for (int j = 1; j <= J; ++j)
    for (int i = 0; i < f.nx; ++i) {
      double s = 0.0;
      for (int c = 0; c <= k; ++c) s += a[c] * f.at(i, (c + 1) * j);
      e.at(i, J - j) = s;
    }
  return e;
}

double interface_jump(const GridFunction& e, int order) {
  const int r = e.interface_row();
  require(r >= 0, "interp", "grid has no interface row");
  require(order >= 0 && order <= 3, "interp", "jump order must lie in 0..3");
  require(r >= order + 1 && r + order + 1 < e.ny, "interp", "not enough rows around the interface");
  // one-sided second-order stencils for d^l/dy^l at the first node
  static const std::vector<std::vector<double>> st = {
      {1.0}, {-1.5, 2.0, -0.5}, {2.0, -5.0, 4.0, -1.0}, {-2.5, 9.0, -12.0, 7.0, -1.5}};
  const auto& w = st[order];
  const double scale = std::pow(e.h, -order);
  double worst = 0.0;
  for (int i = 0; i < e.nx; ++i) {
    double up = 0.0, down = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
      up += w[m] * e.at(i, r + static_cast<int>(m));
      down += w[m] * e.at(i, r - static_cast<int>(m));
    }
    // the lower stencil runs backwards, which flips odd orders
    if (order % 2 == 1) down = -down;
    worst = std::max(worst, std::abs(up - down) * scale);
  }
  return worst;
}

namespace {

std::vector<double> kernel_weights(int m, double h, double eps) {
  std::vector<double> w(2 * m + 1);
  double s = 0.0;
  for (int i = -m; i <= m; ++i) {
    const double u = i * h / eps;
    const double q = 1.0 - 2.0 * u * u;
    w[i + m] = q > 0.0 ? std::exp(-1.0 / q) : 0.0;
    s += w[i + m];
  }
  for (double& x : w) x /= s;
  return w;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

GridFunction jet_mollify(const GridFunction& f, double eps, double t) {
  require(eps > 0.0 && t >= 0.0, "interp", "eps must be positive and t nonnegative");
  const int K = static_cast<int>(std::floor(t + 1e-12));
  const int m = static_cast<int>(std::floor(eps / (std::sqrt(2.0) * f.h)));
  if (m < 1) fail(ErrorKind::Input, "interp", "eps is below the grid resolution");
  const bool one = f.one_dimensional();
  const int nx = f.nx - 2 * m, ny = one ? 1 : f.ny - 2 * m;
  if (nx < 3 || (!one && ny < 3)) fail(ErrorKind::Input, "interp", "eps too large for the domain margin");
  const auto w = kernel_weights(m, f.h, eps);
  GridFunction out;
  out.h = f.h;
  out.x0 = f.x0 + m * f.h;
  out.y0 = one ? f.y0 : f.y0 + m * f.h;
  out.nx = nx;
  out.ny = ny;
  out.t = f.t;
  out.vanishing = false;
  out.v.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  for (int ax = 0; ax <= K; ++ax)
    for (int ay = 0; ax + ay <= K; ++ay) {
      if (one && ay > 0) continue;
      const GridFunction D = partial(f, ax, ay);
      std::vector<double> kx(2 * m + 1), ky(2 * m + 1);
      for (int i = -m; i <= m; ++i) {
        kx[i + m] = w[i + m] * std::pow(i * f.h, ax) / factorial(ax);
        ky[i + m] = w[i + m] * std::pow(i * f.h, ay) / factorial(ay);
      }
      // x pass over all rows, then y pass into the cropped output
      GridFunction tmp;
      tmp.nx = nx;
      tmp.ny = f.ny;
      tmp.v.assign(static_cast<std::size_t>(nx) * f.ny, 0.0);
      for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < nx; ++i) {
          double s = 0.0;
          for (int a = -m; a <= m; ++a) s += kx[a + m] * D.at(i + m - a, j);
          tmp.at(i, j) = s;
        }
      if (one) {
        for (int i = 0; i < nx; ++i) out.at(i, 0) += tmp.at(i, 0);
        continue;
      }
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          double s = 0.0;
          for (int b = -m; b <= m; ++b) s += ky[b + m] * tmp.at(i, j + m - b);
          out.at(i, j) += s;
        }
    }
  return out;
}

double interface_cutoff(double s) {
  const double a = std::abs(s);
  if (a <= 1.5) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - smooth_step((a - 1.5) / 0.5);
}

GridFunction boundary_correct(const GridFunction& g, double sigma) {
  require(sigma > 0.0, "interp", "cutoff scale must be positive");
  const int r = g.interface_row();
  require(r >= 0, "interp", "grid has no interface row");
  GridFunction o = g;
  for (int j = 0; j < g.ny; ++j) {
    const double c = interface_cutoff(g.y(j) / sigma);
    if (c == 0.0) continue;
    for (int i = 0; i < g.nx; ++i) o.at(i, j) = g.at(i, j) - c * g.at(i, r);
  }
  o.vanishing = true;
  return o;
}

GridFunction restrict_to(const GridFunction& g, const GridFunction& like) {
  require(std::abs(g.h - like.h) <= 1e-12 * g.h, "interp", "restriction needs equal spacing");
  const double fx = (like.x0 - g.x0) / g.h, fy = (like.y0 - g.y0) / g.h;
  const int ox = static_cast<int>(std::lround(fx)), oy = static_cast<int>(std::lround(fy));
  require(std::abs(fx - ox) < 1e-9 && std::abs(fy - oy) < 1e-9, "interp", "grids are not nested");
  require(ox >= 0 && oy >= 0 && ox + like.nx <= g.nx && oy + like.ny <= g.ny, "interp",
          "target grid is not inside the source");
  GridFunction o = like;
  o.t = g.t;
  o.vanishing = g.vanishing;
  for (int j = 0; j < like.ny; ++j)
    for (int i = 0; i < like.nx; ++i) o.at(i, j) = g.at(i + ox, j + oy);
  return o;
}

std::vector<Decomposition> k_decompositions(const GridFunction& f, int k, std::span<const double> eps,
                                            double sigma) {
  require(f.interface_row() == 0 && !f.one_dimensional(), "interp",
          "K-functional expects a half-box grid with the interface as its first row");
  require(k >= 1, "interp", "k must be positive");
  std::vector<Decomposition> out;
  out.push_back({0.0, f.sup(), 0.0});
  if (k <= f.t) out.push_back({0.0, 0.0, holder_norm_grid(f, k)});
  const GridFunction E = reflect_extend(f, f.t);
  for (double e : eps) {
    const GridFunction M = jet_mollify(E, e, f.t);
    if (M.interface_row() < 0) fail(ErrorKind::Input, "interp", "eps too large: interface lost after cropping");
    const GridFunction B = boundary_correct(M, sigma);
    // g1 = B where the kernel fitted, 0 elsewhere; f must vanish on that margin
    GridFunction g1 = f;
    double edge = 0.0;
    const int ox = static_cast<int>(std::lround((B.x0 - f.x0) / f.h));
    const int oy = static_cast<int>(std::lround((B.y0 - f.y0) / f.h));
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const int bi = i - ox, bj = j - oy;
        if (bi >= 0 && bi < B.nx && bj >= 0 && bj < B.ny) {
          g1.at(i, j) = B.at(bi, bj);
        } else {
          g1.at(i, j) = 0.0;
          edge = std::max(edge, std::abs(f.at(i, j)));
        }
      }
    if (edge > 1e-12 * std::max(1.0, f.sup()))
      fail(ErrorKind::Input, "interp", "f must vanish on the mollification margin of the box");
    Decomposition d;
    d.eps = e;
    double a0 = 0.0;
    for (std::size_t q = 0; q < f.v.size(); ++q) a0 = std::max(a0, std::abs(f.v[q] - g1.v[q]));
    d.a0 = a0;
    d.a1 = holder_norm_grid(g1, k);
    out.push_back(d);
  }
  return out;
}

double kfunctional(const std::vector<Decomposition>& dec, double s) {
  require(!dec.empty(), "interp", "no decompositions");
  require(s >= 0.0, "interp", "K-functional parameter must be nonnegative");
  double best = 1e300;
  for (const auto& d : dec) best = std::min(best, d.a0 + s * d.a1);
  return best;
}

}  // namespace crd
