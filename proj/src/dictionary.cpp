#include "crdisc/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/interp.hpp"
#include "crdisc/parallel.hpp"

namespace crd {

double TestForm::operator()(cplx z) const {
  const cplx w = (z - c) / r;
  const double q = 1.0 - std::norm(w);
  if (q <= 0.0) return 0.0;
  const double psi = std::exp(1.0 - 1.0 / q);
  double e = 1.0;
  switch (envelope) {
    case 1: e = std::cos(kPi * z.real()); break;
    case 2: e = std::sin(kPi * z.real()); break;
    case 3: e = std::cos(kPi * z.imag()); break;
    case 4: e = std::sin(kPi * z.imag()); break;
    default: break;
  }
  return psi * e * (1.0 - std::norm(z));
}

Dictionary Dictionary::build(int level) {
  require(level >= 0 && level <= 7, "dictionary", "level must lie in 0..7");
  Dictionary d;
  d.level = level;
  for (int l = 0; l <= level; ++l) {
    const double r = std::ldexp(1.0, -l);
    const int m = static_cast<int>(std::ceil(1.0 / r));
    for (int j = -m; j <= m; ++j)
      for (int i = -m; i <= m; ++i) {
        const cplx c(i * r, j * r);
        if (std::abs(c) >= 1.0) continue;
        const int envs = l <= 1 ? 5 : 1;
        for (int e = 0; e < envs; ++e) d.forms.push_back({c, r, e});
      }
  }
  return d;
}

double form_norm(const TestForm& f, double t) {
  const double h = f.r / 8.0;
  const double half = f.r + 2.0 * h;
  const int n = static_cast<int>(std::lround(2.0 * half / h)) + 1;
  const double x0 = f.c.real() - half, y0 = f.c.imag() - half;
  GridFunction g = GridFunction::sample([&](double x, double y) { return f(cplx(x, y)); }, x0, y0, h, n, n);
  std::vector<char> mask(g.v.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(j) * n + i] = std::hypot(g.x(i), g.y(j)) <= 1.0;
  return holder_norm_grid(g, t, &mask);
}

const std::vector<double>& dictionary_norms(const Dictionary& d, double t) {
  static std::mutex mu;
  static std::map<std::pair<int, long long>, std::unique_ptr<std::vector<double>>> cache;
  const auto key = std::make_pair(d.level, std::llround(t * 1e9));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto norms = std::make_unique<std::vector<double>>(d.forms.size());
  parallel_for(static_cast<int>(d.forms.size()), [&](int i) { (*norms)[i] = form_norm(d.forms[i], t); });
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::move(norms);
  return *slot;
}

CurrentOnDisc::CurrentOnDisc(int n) : n_(n), rho_(static_cast<std::size_t>(n) * n, 0.0) {
  require(n >= 4, "dictionary", "current grid too small");
}

CurrentOnDisc CurrentOnDisc::density(const std::function<double(cplx)>& rho, int n) {
  CurrentOnDisc T(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (T.inside(i, j)) T.rho(i, j) = rho(T.centre(i, j));
  return T;
}

CurrentOnDisc CurrentOnDisc::atom(cplx z, double mass, int n) {
  CurrentOnDisc T(n);
  T.add_atom(z, mass);
  return T;
}

cplx CurrentOnDisc::centre(int i, int j) const { return cplx(-1.0 + (i + 0.5) * cell(), -1.0 + (j + 0.5) * cell()); }

bool CurrentOnDisc::inside(int i, int j) const { return std::abs(centre(i, j)) < 1.0; }

void CurrentOnDisc::add_atom(cplx z, double mass) {
  require(std::abs(z) < 1.0, "dictionary", "atoms must lie in the open disc");
  atoms_.push_back({z, mass});
}

CurrentOnDisc& CurrentOnDisc::operator*=(double s) {
  for (double& x : rho_) x *= s;
  for (auto& a : atoms_) a.mass *= s;
  return *this;
}

double CurrentOnDisc::pair(const std::function<double(cplx)>& phi) const {
  double s = 0.0;
  const double area = cell() * cell();
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      if (inside(i, j) && rho(i, j) != 0.0) s += rho(i, j) * phi(centre(i, j)) * area;
  for (const auto& a : atoms_) s += a.mass * phi(a.z);
  return s;
}

double CurrentOnDisc::pair(const TestForm& f) const {
  double s = 0.0;
  const double area = cell() * cell();
  auto idx = [&](double x) { return static_cast<int>(std::floor((x + 1.0) / cell())); };
  const int i0 = std::max(0, idx(f.c.real() - f.r)), i1 = std::min(n_ - 1, idx(f.c.real() + f.r));
  const int j0 = std::max(0, idx(f.c.imag() - f.r)), j1 = std::min(n_ - 1, idx(f.c.imag() + f.r));
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      if (inside(i, j) && rho(i, j) != 0.0) s += rho(i, j) * f(centre(i, j)) * area;
  for (const auto& a : atoms_) s += a.mass * f(a.z);
  return s;
}

double CurrentOnDisc::mass() const {
  double s = 0.0;
  const double area = cell() * cell();
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      if (inside(i, j)) s += std::abs(rho(i, j)) * area;
  for (const auto& a : atoms_) s += std::abs(a.mass);
  return s;
}

double CurrentOnDisc::total() const {
  return pair([](cplx) { return 1.0; });
}

bool CurrentOnDisc::positive() const {
  for (double x : rho_)
    if (x < 0.0) return false;
  for (const auto& a : atoms_)
    if (a.mass < 0.0) return false;
  return true;
}

NegNormReport neg_holder_norm(const CurrentOnDisc& T, double t, const Dictionary& d) {
  if (d.forms.empty()) fail(ErrorKind::Input, "dictionary", "empty dictionary");
  require(t >= 0.0, "dictionary", "negative regularity index");
  const auto& norms = dictionary_norms(d, t);
  NegNormReport rep;
  rep.t = t;
  rep.dictionary = d.id();
  rep.grid = T.n();
  for (std::size_t i = 0; i < d.forms.size(); ++i) {
    const double v = std::abs(T.pair(d.forms[i])) / norms[i];
    if (v > rep.value) {
      rep.value = v;
      rep.argmax = static_cast<int>(i);
    }
  }
  return rep;
}

InterpolationReport verify_interpolation_inequality(
    const std::vector<std::pair<std::string, CurrentOnDisc>>& family, double t0, double t1, double t2,
    const Dictionary& d) {
  require(t0 >= 0.0 && t0 < t1 && t1 < t2, "dictionary", "need 0 <= t0 < t1 < t2");
  InterpolationReport rep;
  rep.t0 = t0;
  rep.t1 = t1;
  rep.t2 = t2;
  rep.t_star = (t2 - t1) / (t2 - t0);
  rep.dictionary = d.id();
  // warm the norm caches in parallel before the serial pairing loop
  for (double t : {t0, t1, t2}) dictionary_norms(d, t);
  rep.rows.resize(family.size());
  parallel_for(static_cast<int>(family.size()), [&](int k) {
    const auto& [name, T] = family[k];
    InterpolationRow r;
    r.name = name;
    r.n0 = neg_holder_norm(T, t0, d).value;
    r.n1 = neg_holder_norm(T, t1, d).value;
    r.n2 = neg_holder_norm(T, t2, d).value;
    if (r.n0 <= 0.0 || r.n2 <= 0.0)
      fail(ErrorKind::Numerical, "dictionary", "degenerate (zero) norm for current " + name);
    r.ratio = r.n1 / (std::pow(r.n0, rep.t_star) * std::pow(r.n2, 1.0 - rep.t_star));
    rep.rows[k] = r;
  });
  for (const auto& r : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    if (r.n2 > r.n1 || r.n1 > r.n0) rep.chain = false;
  }
  return rep;
}

std::vector<std::pair<std::string, CurrentOnDisc>> builtin_currents(int n) {
  std::vector<std::pair<std::string, CurrentOnDisc>> out;
  out.emplace_back("density-one", CurrentOnDisc::density([](cplx) { return 1.0; }, n));
  out.emplace_back("density-x", CurrentOnDisc::density([](cplx z) { return z.real(); }, n));
  out.emplace_back("density-wave",
                   CurrentOnDisc::density([](cplx z) { return std::cos(3.0 * z.real()) * std::sin(2.0 * z.imag()); }, n));
  out.emplace_back("density-bump",
                   CurrentOnDisc::density([](cplx z) { return std::exp(-std::norm(z - 0.3) / 0.04); }, n));
  for (double depth : {0.5, 0.25, 0.125, 0.0625}) {
    out.emplace_back("atom-depth-" + std::to_string(depth).substr(0, 6),
                     CurrentOnDisc::atom(cplx(1.0 - depth, 0.0), 1.0, n));
  }
  CurrentOnDisc dip(n);
  dip.add_atom(cplx(0.5, 0.0), 1.0);
  dip.add_atom(cplx(0.55, 0.0), -1.0);
  out.emplace_back("dipole", dip);
  CurrentOnDisc circ(n);
  for (int k = 0; k < 64; ++k) circ.add_atom(std::polar(0.5, 2.0 * kPi * k / 64), 1.0 / 64);
  out.emplace_back("circle", circ);
  return out;
}

}  // namespace crd
