#include <doctest.h>

#include <cmath>

#include "crdisc/dictionary.hpp"
#include "crdisc/family.hpp"
#include "crdisc/interp.hpp"

using namespace crd;

TEST_CASE("reflection coefficients solve the moment system") {
  const std::vector<std::vector<double>> expected{{1}, {3, -2}, {6, -8, 3}};
  for (int k = 0; k < 3; ++k) {
    const auto a = reflection_coefficients(k);
    REQUIRE(a.size() == expected[k].size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(expected[k][i]).epsilon(1e-12));
  }
  for (int k = 0; k <= 4; ++k) CHECK(moment_residual(reflection_coefficients(k)) < 1e-9);
}

TEST_CASE("reflection keeps derivatives continuous across the interface") {
  const double h = 1.0 / 64;
  GridFunction f = GridFunction::sample([](double x, double y) { return std::sin(x + 2 * y) + y * y; }, -1, 0, h,
                                        129, 65);
  const GridFunction e = reflect_extend(f, 1.5);
  CHECK(interface_jump(e, 0) < 1e-12);
  CHECK(interface_jump(e, 1) < 20 * h);
}

TEST_CASE("jet mollification error decays like eps^t for |x|^t") {
  for (double t : {0.5, 1.5}) {
    const GridFunction f =
        GridFunction::sample([&](double x, double) { return std::pow(std::abs(x), t); }, -1, 0, 1.0 / 2048, 4097, 1);
    std::vector<double> eps, err;
    for (double e : {0.125, 0.0625, 0.03125, 0.015625}) {
      const GridFunction m = jet_mollify(f, e, t);
      const GridFunction r = restrict_to(f, m);
      double d = 0.0;
      for (std::size_t q = 0; q < m.v.size(); ++q) d = std::max(d, std::abs(m.v[q] - r.v[q]));
      eps.push_back(e);
      err.push_back(d);
    }
    CHECK(fit_loglog(eps, err).slope >= t - 0.1);
  }
}

TEST_CASE("boundary correction vanishes on the interface") {
  GridFunction f = GridFunction::sample([](double x, double y) { return std::cos(x) + y; }, -1, 0, 1.0 / 32, 65, 33);
  const GridFunction g = boundary_correct(f, 0.25);
  const int row = g.interface_row();
  REQUIRE(row >= 0);
  for (int i = 0; i < g.nx; ++i) CHECK(std::abs(g.at(i, row)) < 1e-14);
}

TEST_CASE("K-functional is nondecreasing and concave in s") {
  // a bump tangent to the interface, zero on the mollification margin
  GridFunction f = GridFunction::sample(
      [](double x, double y) {
        const double w2 = (x * x + (y - 0.25) * (y - 0.25)) / 0.0625;
        return w2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - w2)) : 0.0;
      },
      -1, 0, 1.0 / 64, 129, 65);
  f.t = 4.0;
  f.vanishing = true;
  const std::vector<double> eps{0.25, 0.125, 0.0625};
  const auto dec = k_decompositions(f, 2, eps);
  double prev = 0.0;
  for (double s = 1e-3; s < 10.0; s *= 2.0) {
    const double k = kfunctional(dec, s);
    CHECK(k >= prev - 1e-15);
    // min of affine functions: K(2s) <= 2 K(s)
    CHECK(kfunctional(dec, 2.0 * s) <= 2.0 * k + 1e-14);
    prev = k;
  }
}

TEST_CASE("dictionary enumeration is deterministic") {
  const Dictionary a = Dictionary::build(4), b = Dictionary::build(4);
  REQUIRE(a.forms.size() == b.forms.size());
  CHECK(a.forms.size() == 1081);
  CHECK(Dictionary::build(5).forms.size() == 4286);
  CHECK(a.id() == "bump-L4");
  for (const auto& f : a.forms) CHECK(std::abs(f.c) < 1.0);
}

TEST_CASE("negative norm is a seminorm") {
  const Dictionary d = Dictionary::build(3);
  const CurrentOnDisc T = CurrentOnDisc::atom(cplx(0.2, 0.1), 1.0);
  CurrentOnDisc T2 = T;
  T2 *= -3.0;
  const double a = neg_holder_norm(T, 0.5, d).value;
  CHECK(a > 0.0);
  CHECK(neg_holder_norm(T2, 0.5, d).value == doctest::Approx(3.0 * a));
  CHECK(neg_holder_norm(CurrentOnDisc(64), 0.5, d).value == 0.0);
}

TEST_CASE("negative norms decrease in the order") {
  const Dictionary d = Dictionary::build(3);
  const CurrentOnDisc T = CurrentOnDisc::density([](cplx z) { return 1.0 + z.real(); }, 64);
  CHECK(neg_holder_norm(T, 1.5, d).value <= neg_holder_norm(T, 0.5, d).value);
}

TEST_CASE("interpolation ratio is finite on the built-in currents") {
  const auto fam = builtin_currents(64);
  CHECK(fam.size() == 10);
  const InterpolationReport r = verify_interpolation_inequality(fam, 0.25, 0.75, 1.5, Dictionary::build(3));
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.chain);
  CHECK(r.t_star == doctest::Approx((1.5 - 0.75) / (1.5 - 0.25)));
}
