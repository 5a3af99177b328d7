#pragma once

#include <functional>
#include <span>
#include <vector>

namespace crd {

/// Samples on the uniform grid (x0 + i h, y0 + j h), 0 <= i < nx, 0 <= j < ny.
/// ny == 1 is a one-dimensional function of x.
struct GridFunction {
  double x0 = 0.0, y0 = 0.0, h = 1.0;
  int nx = 0, ny = 0;
  std::vector<double> v;
  /// Regularity tag t and membership in the boundary-vanishing subspace (trace on y = 0).
  double t = 0.0;
  bool vanishing = false;

  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }
  double& at(int i, int j) { return v[static_cast<std::size_t>(j) * nx + i]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(j) * nx + i]; }
  bool one_dimensional() const { return ny == 1; }
  /// Row index of y = 0, or -1 when the interface is not a grid row.
  int interface_row() const;
  double sup() const;

  static GridFunction sample(const std::function<double(double, double)>& f, double x0, double y0, double h,
                             int nx, int ny);
};

/// d^{ax} / dx^{ax} d^{ay} / dy^{ay} by second-order central differences (one-sided at the edges).
GridFunction partial(const GridFunction& g, int ax, int ay);

/// Holder norm with the project convention: sum_{j <= k} max_{|a| = j} sup |D^a g| plus
/// max_{|a| = k} of the beta-seminorm over grid pairs at separation in [h, 1].
/// 2D pairs use a dense disc of offsets of radius 6 cells plus dyadic multiples of 8 directions.
/// The optional mask (size nx*ny) restricts both sups and pairs.
double holder_norm_grid(const GridFunction& g, double t, const std::vector<char>* mask = nullptr);

/// ||g||_{C^0} + sup over offsets |Delta_h^l g| / |h|^alpha, over the same offset set.
double delta_seminorm(const GridFunction& g, double alpha, int l);

/// a_1..a_{k+1} with sum_k (-k)^l a_k = 1 for 0 <= l <= [t] = k.
std::vector<double> reflection_coefficients(int k);
/// max_l | sum_k (-k)^l a_k - 1 |
double moment_residual(const std::vector<double>& a);

/// f lives on y >= 0 (interface row 0). The extension fills y = -j h with sum a_k f(x, k j h)
/// for every j with ([t] + 1) j < ny.
GridFunction reflect_extend(const GridFunction& f, double t);
/// max over x of the one-sided jump of d^l/dy^l across y = 0, for l <= [t].
double interface_jump(const GridFunction& e, int order);

/// int sum_{|a| <= [t]} D^a f(x - eps y) (eps y)^a / a! chi(y) dy with a product kernel supported
/// in the unit ball; the result is cropped to where the kernel stays inside the grid.
GridFunction jet_mollify(const GridFunction& f, double eps, double t);

/// Cutoff equal to 1 on [-3/2, 3/2], supported in [-2, 2].
double interface_cutoff(double s);
/// g(x, y) - tau(y / sigma) g(x, 0); vanishes on y = 0.
GridFunction boundary_correct(const GridFunction& g, double sigma);

/// Restriction of g onto the nodes of `like` (same spacing, nested grids).
GridFunction restrict_to(const GridFunction& g, const GridFunction& like);

struct Decomposition {
  double eps = 0.0;  // 0 for the trivial decompositions
  double a0 = 0.0;   // ||f - g1||_{C^0}
  double a1 = 0.0;   // ||g1||_{C^k}
};

/// Candidate splittings f = (f - g1) + g1 with g1 from reflect, jet-mollify and boundary-correct
/// at each eps, plus f + 0 and (when k <= f.t) 0 + f. f lives on a half box with interface y = 0.
std::vector<Decomposition> k_decompositions(const GridFunction& f, int k, std::span<const double> eps,
                                            double sigma = 0.25);
/// min over the decompositions of a0 + s a1.
double kfunctional(const std::vector<Decomposition>& dec, double s);

}  // namespace crd
