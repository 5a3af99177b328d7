#include <doctest.h>

#include <cmath>
#include <random>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"

using namespace crd;

namespace {

BoundaryFunction random_poly(int modes, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c(modes + 1, 0.0);
  c[0] = u(rng);
  for (int k = 1; k <= degree; ++k) c[k] = cplx(u(rng), u(rng));
  return BoundaryFunction::from_coefficients(c);
}

}  // namespace

TEST_CASE("analyze inverts synthesize") {
  const auto f = random_poly(64, 32, 3);
  const auto g = analyze(synthesize(f, 256), 64);
  for (int k = 0; k <= 64; ++k) CHECK(std::abs(g.coeff(k) - f.coeff(k)) < 1e-14);
}

TEST_CASE("analyze rejects an aliasing grid") {
  std::vector<double> s(64, 1.0);
  CHECK_THROWS_AS(analyze(s, 64), Error);
}

TEST_CASE("hilbert transform sends cos to sin and sin to -cos") {
  for (int k = 1; k < 6; ++k) {
    const auto h = hilbert_transform(BoundaryFunction::trig(16, k, 1.0, 0.0));
    const auto h2 = hilbert_transform(BoundaryFunction::trig(16, k, 0.0, 1.0));
    for (double th : {0.1, 1.3, 2.9}) {
      CHECK(h(th) == doctest::Approx(std::sin(k * th)).epsilon(1e-13));
      CHECK(h2(th) == doctest::Approx(-std::cos(k * th)).epsilon(1e-13));
    }
  }
}

TEST_CASE("hilbert squared is minus identity on mean-free functions") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto f = random_poly(128, 64, seed);
    const auto hh = hilbert_transform(hilbert_transform(f));
    CHECK(std::abs(hh.coeff(0)) < 1e-15);
    for (int k = 1; k <= 128; ++k) CHECK(std::abs(hh.coeff(k) + f.coeff(k)) < 1e-14);
  }
}

TEST_CASE("t1 transform vanishes at theta = 0") {
  const auto f = random_poly(64, 20, 11);
  CHECK(std::abs(t1_transform(f)(0.0)) < 1e-13);
}

TEST_CASE("poisson extension of r^k cos k theta") {
  const auto P = poisson_extend(BoundaryFunction::trig(32, 3, 1.0, 0.0));
  for (double r : {0.0, 0.3, 0.9})
    for (double th : {0.2, 2.0})
      CHECK(P(std::polar(r, th)) == doctest::Approx(r * r * r * std::cos(3 * th)).epsilon(1e-13));
  auto [gx, gy] = P.gradient(cplx(0.5, 0.0));
  CHECK(gx == doctest::Approx(3 * 0.25).epsilon(1e-12));
  CHECK(std::abs(gy) < 1e-12);
}

TEST_CASE("cauchy transform carries f and its conjugate on the circle") {
  const auto f = random_poly(64, 30, 5);
  const auto C = cauchy_transform(f);
  const auto H = hilbert_transform(f);
  for (double th : {0.0, 0.7, 3.0, 5.5}) {
    const cplx v = C(std::polar(1.0, th));
    CHECK(v.real() == doctest::Approx(f(th)).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(H(th)).epsilon(1e-12));
  }
}

TEST_CASE("holder norm of a constant is its modulus") {
  CHECK(holder_norm(BoundaryFunction::constant(16, -2.5), 0.5, 128) == doctest::Approx(2.5));
}

TEST_CASE("holder norm grows with the order") {
  const auto f = BoundaryFunction::trig(32, 4, 1.0, 0.0);
  CHECK(holder_norm(f, 0.5, 256) < holder_norm(f, 1.5, 256));
}
