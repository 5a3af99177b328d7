#include <doctest.h>

#include <cmath>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/trace.hpp"

using namespace crd;

TEST_CASE("disc rules integrate area") {
  double a = 0.0, b = 0.0;
  for (double w : DiscRule::make(16, 64).w) a += w;
  for (double w : DiscRule::band(0.5, 8, 64).w) b += w;
  CHECK(a == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(b == doctest::Approx(kPi * 0.75).epsilon(1e-12));
}

TEST_CASE("gamma interpolates beta between beta0 and 2") {
  for (double beta0 : {0.25, 0.5, 0.9})
    for (double beta : {1.1, 1.5, 1.9}) {
      const double g = trace_gamma(beta0, beta);
      CHECK(g * beta0 + (1 - g) * 2.0 == doctest::Approx(beta));
    }
}

TEST_CASE("interpolated bound terms") {
  const TraceBound b = interpolated_bound(0.3, 0.2, 0.5, 0.1, 0.5, 1.5, 0.25);
  const double g = 1.0 / 3.0;
  CHECK(b.gamma == doctest::Approx(g));
  CHECK(b.terms[0] == doctest::Approx(0.2));
  CHECK(b.terms[1] == doctest::Approx(std::pow(0.25, -2 * (1 - g)) * std::pow(0.5, g) * std::pow(0.2, 1 - g)));
  CHECK(b.terms[2] == doctest::Approx(std::pow(0.5, g) * std::pow(0.1, 1 - g)));
  CHECK(b.rhs == doctest::Approx(b.terms[0] + b.terms[1] + b.terms[2]));
  CHECK(b.ratio == doctest::Approx(0.3 / b.rhs));
}

TEST_CASE("green average at the origin") {
  // 2 pi int_0^{1/2} r log r dr
  const double exact = kPi * (std::log(0.5) / 4.0 - 1.0 / 8.0);
  CHECK(green_average_closed(0.0) == doctest::Approx(exact).epsilon(1e-12));
  // vanishes on the circle
  CHECK(std::abs(green_average_closed(std::polar(1.0, 0.4))) < 1e-12);
}

TEST_CASE("constant candidate: boundary over area is exactly 2") {
  const TraceCandidate one = make_candidate("one", [](cplx) { return 1.0; }, [](cplx) { return 0.0; }, 16);
  const Lemma53Row r = boundary_l1_bound(one, 1.5, Dictionary::build(2));
  CHECK(r.neg_norm == 0.0);
  CHECK(r.ratio == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("candidates must be nonnegative with a matching laplacian") {
  CHECK_THROWS_AS(make_candidate("neg", [](cplx z) { return z.real(); }, [](cplx) { return 0.0; }, 16), Error);
  CHECK_THROWS_AS(
      make_candidate("wrong", [](cplx z) { return std::norm(z); }, [](cplx) { return 0.0; }, 16), Error);
  // dd^c |z|^2 = 4 / (2 pi) against dx dy
  CHECK_NOTHROW(make_candidate("bowl", [](cplx z) { return std::norm(z); }, [](cplx) { return 2.0 / kPi; }, 16));
}

TEST_CASE("riesz decomposition reconstructs the bowl") {
  const TraceCandidate c =
      make_candidate("bowl", [](cplx z) { return std::norm(z); }, [](cplx) { return 2.0 / kPi; }, 16);
  const RieszReport r = riesz_decompose(c);
  CHECK(r.error <= 10.0 * r.quad_tol + 1e-12);
  CHECK(r.pass);
}

TEST_CASE("weighted mass bounds the annulus term") {
  const TraceCandidate c =
      make_candidate("bowl", [](cplx z) { return std::norm(z); }, [](cplx) { return 2.0 / kPi; }, 16);
  // int (1-|z|)^beta0 rho >= int_{1-|z| <= 2 eps} (1-|z|) rho for 2 eps <= 1
  CHECK(c.weighted_mass(0.5) >= c.annulus(0.25));
  CHECK(c.l1() == doctest::Approx(kPi / 2).epsilon(0.01));
}
