#include "crdisc/circle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "crdisc/errors.hpp"

namespace crd {

namespace {

// FFTW plans are created under a lock and executed with the new-array interface,
// so one plan per size serves every thread.
struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  Plans p;
  p.r2c = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(n, p).first->second;
}

struct RealBuf {
  double* p;
  explicit RealBuf(int n) : p(fftw_alloc_real(n)) {}
  ~RealBuf() { fftw_free(p); }
};
struct CplxBuf {
  fftw_complex* p;
  explicit CplxBuf(int n) : p(fftw_alloc_complex(n)) {}
  ~CplxBuf() { fftw_free(p); }
};

}  // namespace

BoundaryFunction::BoundaryFunction(int modes) {
  require(modes >= 0, "circle", "modes must be nonnegative");
  c_.assign(modes + 1, cplx(0.0, 0.0));
}

BoundaryFunction BoundaryFunction::from_coefficients(std::vector<cplx> c) {
  require(!c.empty(), "circle", "coefficient list is empty");
  BoundaryFunction f;
  c[0] = cplx(c[0].real(), 0.0);
  f.c_ = std::move(c);
  return f;
}

BoundaryFunction BoundaryFunction::constant(int modes, double value) {
  BoundaryFunction f(modes);
  f.c_[0] = value;
  return f;
}

BoundaryFunction BoundaryFunction::trig(int modes, int k, double a, double b) {
  require(k >= 0 && k <= modes, "circle", "trig mode out of range");
  BoundaryFunction f(modes);
  if (k == 0) {
    f.c_[0] = a;
  } else {
    // a cos + b sin = (a - i b)/2 e^{ik} + conj
    f.c_[k] = cplx(a / 2.0, -b / 2.0);
  }
  return f;
}

cplx BoundaryFunction::coeff(int k) const {
  int a = std::abs(k);
  if (a > modes()) return {0.0, 0.0};
  return k >= 0 ? c_[a] : std::conj(c_[a]);
}

double BoundaryFunction::operator()(double theta) const {
  double s = c_[0].real();
  for (int k = 1; k <= modes(); ++k) s += 2.0 * (c_[k] * std::polar(1.0, k * theta)).real();
  return s;
}

std::vector<double> BoundaryFunction::samples(int grid) const { return synthesize(*this, grid); }

double BoundaryFunction::truncation_error() const {
  const int n = modes();
  double tail = 0.0, total = 0.0;
  for (int k = 0; k <= n; ++k) total += std::abs(c_[k]);
  for (int k = std::max(1, (3 * n) / 4); k <= n; ++k) tail += 2.0 * std::abs(c_[k]);
  return std::max(tail, 4.0 * (n + 1) * 2.2e-16 * total);
}

BoundaryFunction BoundaryFunction::derivative(int order) const {
  BoundaryFunction d(*this);
  for (int k = 0; k <= modes(); ++k) d.c_[k] *= std::pow(cplx(0.0, static_cast<double>(k)), order);
  d.c_[0] = 0.0;
  if (order == 0) d.c_[0] = c_[0];
  return d;
}

BoundaryFunction BoundaryFunction::resized(int modes) const {
  BoundaryFunction r(modes);
  for (int k = 0; k <= std::min(modes, this->modes()); ++k) r.c_[k] = c_[k];
  return r;
}

BoundaryFunction& BoundaryFunction::operator+=(const BoundaryFunction& o) {
  if (o.modes() > modes()) c_.resize(o.c_.size(), cplx(0.0, 0.0));
  for (int k = 0; k <= o.modes(); ++k) c_[k] += o.c_[k];
  return *this;
}

BoundaryFunction& BoundaryFunction::operator-=(const BoundaryFunction& o) {
  if (o.modes() > modes()) c_.resize(o.c_.size(), cplx(0.0, 0.0));
  for (int k = 0; k <= o.modes(); ++k) c_[k] -= o.c_[k];
  return *this;
}

BoundaryFunction& BoundaryFunction::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

BoundaryFunction analyze(std::span<const double> samples, int modes) {
  const int m = static_cast<int>(samples.size());
  require(modes >= 0, "circle", "modes must be nonnegative");
  require(m >= 2 * modes + 1, "circle",
          "analyze needs at least 2N+1 samples (got " + std::to_string(m) + " for N=" + std::to_string(modes) + ")");
  const Plans& p = plans_for(m);
  RealBuf in(m);
  CplxBuf out(m / 2 + 1);
  std::copy(samples.begin(), samples.end(), in.p);
  fftw_execute_dft_r2c(p.r2c, in.p, out.p);
  std::vector<cplx> c(modes + 1);
  for (int k = 0; k <= modes; ++k) c[k] = cplx(out.p[k][0], out.p[k][1]) / static_cast<double>(m);
  return BoundaryFunction::from_coefficients(std::move(c));
}

BoundaryFunction analyze(std::span<const double> theta, std::span<const double> samples, int modes) {
  require(theta.size() == samples.size(), "circle", "angle and sample counts differ");
  const double m = static_cast<double>(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    double expect = 2.0 * kPi * static_cast<double>(j) / m;
    require(std::abs(theta[j] - expect) <= 1e-12 * (1.0 + expect), "circle",
            "samples are not on the uniform grid 2 pi j / M");
  }
  return analyze(samples, modes);
}

std::vector<double> synthesize(const BoundaryFunction& f, int grid) {
  const int n = f.modes();
  require(grid >= 2 * n + 1, "circle", "synthesis grid must have at least 2N+1 points");
  const Plans& p = plans_for(grid);
  CplxBuf in(grid / 2 + 1);
  RealBuf out(grid);
  for (int k = 0; k <= grid / 2; ++k) {
    cplx v = k <= n ? f.coeffs()[k] : cplx(0.0, 0.0);
    in.p[k][0] = v.real();
    in.p[k][1] = v.imag();
  }
  fftw_execute_dft_c2r(p.c2r, in.p, out.p);
  return std::vector<double>(out.p, out.p + grid);
}

BoundaryFunction hilbert_transform(const BoundaryFunction& f) {
  std::vector<cplx> c(f.coeffs());
  c[0] = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) c[k] *= cplx(0.0, -1.0);
  return BoundaryFunction::from_coefficients(std::move(c));
}

BoundaryFunction t1_transform(const BoundaryFunction& f) {
  BoundaryFunction h = hilbert_transform(f);
  // value at theta = 0 is sum over k != 0 of c_k = 2 Re sum_{k>0} c_k
  double at1 = 0.0;
  for (int k = 1; k <= h.modes(); ++k) at1 += 2.0 * h.coeffs()[k].real();
  h.add_constant(-at1);
  return h;
}

cplx HolomorphicDiscFunction::operator()(cplx z) const {
  cplx s(0.0, 0.0);
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) s = s * z + *it;
  return s;
}

cplx HolomorphicDiscFunction::derivative(cplx z) const {
  cplx s(0.0, 0.0);
  for (std::size_t k = a_.size(); k-- > 1;) s = s * z + static_cast<double>(k) * a_[k];
  return s;
}

cplx HolomorphicDiscFunction::second_derivative(cplx z) const {
  cplx s(0.0, 0.0);
  for (std::size_t k = a_.size(); k-- > 2;) s = s * z + static_cast<double>(k * (k - 1)) * a_[k];
  return s;
}

HolomorphicDiscFunction cauchy_transform(const BoundaryFunction& f) {
  std::vector<cplx> a(f.coeffs());
  for (std::size_t k = 1; k < a.size(); ++k) a[k] *= 2.0;
  return HolomorphicDiscFunction(std::move(a));
}

HarmonicField::HarmonicField(BoundaryFunction src) : src_(std::move(src)), g_(cauchy_transform(src_)) {}

double HarmonicField::operator()(cplx z) const { return g_(z).real(); }

std::pair<double, double> HarmonicField::gradient(cplx z) const {
  cplx d = g_.derivative(z);
  return {d.real(), -d.imag()};
}

std::vector<std::vector<double>> HarmonicField::polar_grid(std::span<const double> radii, int n_theta) const {
  const int n = src_.modes();
  int m = n_theta;
  while (m < 2 * n + 1) m += n_theta;
  const int stride = m / n_theta;
  std::vector<std::vector<double>> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    std::vector<cplx> c(src_.coeffs());
    double rk = 1.0;
    for (int k = 1; k <= n; ++k) {
      rk *= r;
      c[k] *= rk;
    }
    auto full = synthesize(BoundaryFunction::from_coefficients(std::move(c)), m);
    std::vector<double> row(n_theta);
    for (int j = 0; j < n_theta; ++j) row[j] = full[j * stride];
    rows.push_back(std::move(row));
  }
  return rows;
}

HarmonicField poisson_extend(const BoundaryFunction& f) { return HarmonicField(f); }

namespace {

double seminorm_periodic(const std::vector<double>& g, double beta) {
  const int m = static_cast<int>(g.size());
  const double step = 2.0 * kPi / m;
  double best = 0.0;
  for (int off = 1; off <= m / 2; ++off) {
    const double dist = off * step;
    if (dist > 1.0) break;
    const double w = std::pow(dist, -beta);
    for (int j = 0; j < m; ++j) {
      double diff = std::abs(g[(j + off) % m] - g[j]);
      best = std::max(best, diff * w);
    }
  }
  return best;
}

double sup_abs(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

double holder_norm(const BoundaryFunction& g, double t, int grid) {
  require(t >= 0.0, "circle", "holder_norm needs t >= 0");
  const int k = static_cast<int>(std::floor(t));
  const double beta = t - k;
  double total = 0.0;
  std::vector<double> top;
  for (int j = 0; j <= k; ++j) {
    auto s = synthesize(g.derivative(j), grid);
    total += sup_abs(s);
    if (j == k) top = std::move(s);
  }
  if (beta > 0.0) total += seminorm_periodic(top, beta);
  return total;
}

double holder_norm(std::span<const double> samples, double t) {
  require(t >= 0.0, "circle", "holder_norm needs t >= 0");
  const int k = static_cast<int>(std::floor(t));
  const double beta = t - k;
  const int m = static_cast<int>(samples.size());
  if (k == 0) {
    std::vector<double> g(samples.begin(), samples.end());
    return sup_abs(g) + (beta > 0.0 ? seminorm_periodic(g, beta) : 0.0);
  }
  return holder_norm(analyze(samples, (m - 1) / 2), t, m);
}

}  // namespace crd
