#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace crd {

using cplx = std::complex<double>;

/// psi((z - c) / r) E(z) (1 - |z|^2) with psi(w) = exp(1 - 1/(1 - |w|^2)) on |w| < 1.
struct TestForm {
  cplx c;
  double r = 1.0;
  /// 0: 1, 1: cos(pi x), 2: sin(pi x), 3: cos(pi y), 4: sin(pi y)
  int envelope = 0;
  double operator()(cplx z) const;
};

/// Deterministic enumeration: scales 2^-l for 0 <= l <= level, centres on the lattice r Z^2
/// inside the open disc, all five envelopes for l <= 1 and the constant envelope beyond.
struct Dictionary {
  int level = 4;
  std::vector<TestForm> forms;
  static Dictionary build(int level);
  std::string id() const { return "bump-L" + std::to_string(level); }
};

/// C^t norm of a form on a patch grid of spacing r/8 restricted to the closed disc.
double form_norm(const TestForm& f, double t);
/// form_norm for every form (parallel); cached per (level, t) for the process.
const std::vector<double>& dictionary_norms(const Dictionary& d, double t);

/// Order-0 current on the open disc: density on the cell-centred n x n grid over [-1, 1]^2
/// (cells with |centre| < 1) plus point atoms.
class CurrentOnDisc {
 public:
  struct Atom {
    cplx z;
    double mass;
  };
  CurrentOnDisc() = default;
  explicit CurrentOnDisc(int n);
  static CurrentOnDisc density(const std::function<double(cplx)>& rho, int n);
  static CurrentOnDisc atom(cplx z, double mass, int n = 64);

  int n() const { return n_; }
  double cell() const { return 2.0 / n_; }
  cplx centre(int i, int j) const;
  bool inside(int i, int j) const;
  double& rho(int i, int j) { return rho_[static_cast<std::size_t>(j) * n_ + i]; }
  double rho(int i, int j) const { return rho_[static_cast<std::size_t>(j) * n_ + i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  void add_atom(cplx z, double mass);
  CurrentOnDisc& operator*=(double s);

  /// sum rho(cell) phi(centre) |cell| + sum mass phi(atom)
  double pair(const std::function<double(cplx)>& phi) const;
  /// Pairing with a test form, visiting only cells inside its support.
  double pair(const TestForm& f) const;
  /// Total variation mass.
  double mass() const;
  /// Signed total = pairing with 1.
  double total() const;
  bool positive() const;

 private:
  int n_ = 0;
  std::vector<double> rho_;
  std::vector<Atom> atoms_;
};

struct NegNormReport {
  double t = 0.0;
  double value = 0.0;
  std::string dictionary;
  int grid = 0;
  int argmax = -1;
};

/// max over the dictionary of |<T, phi>| / ||phi||_{C^t}: a lower bound of the dual norm.
NegNormReport neg_holder_norm(const CurrentOnDisc& T, double t, const Dictionary& d);

struct InterpolationRow {
  std::string name;
  double n0 = 0, n1 = 0, n2 = 0;
  double ratio = 0;
};

struct InterpolationReport {
  double t0 = 0, t1 = 0, t2 = 0, t_star = 0;
  std::string dictionary;
  std::vector<InterpolationRow> rows;
  double max_ratio = 0.0;
  /// every row satisfies n2 <= n1 <= n0
  bool chain = true;
};

/// ||T||_{-t1} / (||T||_{-t0}^{t*} ||T||_{-t2}^{1-t*}) for each current.
InterpolationReport verify_interpolation_inequality(const std::vector<std::pair<std::string, CurrentOnDisc>>& family,
                                                    double t0, double t1, double t2, const Dictionary& d);

/// Ten currents: smooth densities, atoms at decreasing depth, a dipole and a discretized circle.
std::vector<std::pair<std::string, CurrentOnDisc>> builtin_currents(int n = 128);

}  // namespace crd
