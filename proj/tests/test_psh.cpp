#include <doctest.h>

#include <cmath>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/psh.hpp"
#include "crdisc/psh_verify.hpp"

using namespace crd;

TEST_CASE("trace factor matches dd^c |z|^2 = omega") {
  // |z|^2 has tr(u_{j kbar}) = n, so its trace density is the ratio of omega^n to Lebesgue measure
  CHECK(trace_factor(1) * 1 == doctest::Approx(2.0 / kPi));
  CHECK(trace_factor(2) == doctest::Approx(4.0 / (kPi * kPi)));
}

TEST_CASE("closed forms of the untruncated log") {
  const double inf = std::numeric_limits<double>::infinity();
  // 2 pi int_0^1 r |log r| dr and 2 pi^2 int_0^1 r^3 |log r| dr
  CHECK(trunc_log_ball_l1(1, inf, 1.0) == doctest::Approx(kPi / 2));
  CHECK(trunc_log_ball_l1(2, inf, 1.0) == doctest::Approx(kPi * kPi / 8));
  // truncating far below the ball changes nothing measurable
  CHECK(trunc_log_ball_l1(1, 30.0, 1.0) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(log_rect_integral(1.0, 1.0) < 0.0);
}

TEST_CASE("quadrature matches the truncated-log closed forms") {
  for (const auto& c : closed_form_checks(16)) {
    INFO(c.name);
    CHECK(c.rel_err <= 0.01);
  }
}

TEST_CASE("the kink circle of max(log|z|, -M) carries unit mass") {
  const PshSample s = sample_psh("trunc-log", 1, {3.0}, 1);
  double mass = 0.0;
  for (const auto& l : s.layers()) {
    CHECK(l.radius == doctest::Approx(std::exp(-3.0)));
    mass += l.mass;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("built-in samples satisfy the psh invariants") {
  for (int n : {1, 2})
    for (const auto& spec : builtin_psh_families(n)) {
      INFO(spec.name << " n=" << n);
      const PshSample s = sample_psh(spec.family, n, spec.params, 5);
      CHECK(check_psh_invariants(s, 16, 9).ok());
      CHECK(s.l1() > 0.0);
    }
}

TEST_CASE("harmonic log terms have zero trace") {
  PshTerm t;
  t.kind = TermKind::Log;
  t.centre = {0.0};
  CHECK(t.trace(0.3, 1) == 0.0);
}

TEST_CASE("convex surrogate stays convex and close to g") {
  for (int k : {3, 16, 128}) {
    const ConvexSurrogate g = build_surrogate(k);
    CHECK(g.min_q() >= 0.0);
    CHECK(g.value(2.0 / k) == doctest::Approx(surrogate_g(2.0 / k)));
    CHECK(g.sup_gap() < 2.0 / k);
  }
}

TEST_CASE("surrogate g inverse round trip") {
  for (double t : {0.0, 1e-6, 0.3, 2.0, 50.0}) CHECK(surrogate_g_inverse(surrogate_g(t)) == doctest::Approx(t));
  CHECK_THROWS_AS(surrogate_g_inverse(-1.0), Error);
}

TEST_CASE("dyadic sets and their refinement") {
  const auto a = dyadic_set(0.25, 4, false), b = dyadic_set(0.25, 4, true);
  REQUIRE(a.size() == 4);
  CHECK(a[3] == doctest::Approx(0.25 / 8));
  CHECK(b.size() == 7);
}

TEST_CASE("sup-ratio semantics") {
  Series s;
  s.rows = {{1, 1, 1, 2.0}, {2, 1, 1, 3.0}};
  s.refined = {{1, 1, 1, 2.0}, {2, 1, 1, 3.2}};
  finish_ratio_series(s);
  CHECK(s.sup == 3.0);
  CHECK(s.change == doctest::Approx(0.2 / 3.2));
  CHECK(s.pass);
  s.refined[1].ratio = 4.0;
  finish_ratio_series(s);
  CHECK_FALSE(s.pass);
  Series tiny;
  tiny.rows = {{1, 0, 1, 1e-12}};
  tiny.refined = {{1, 0, 1, 5e-12}};
  finish_ratio_series(tiny);
  CHECK(tiny.pass);
}

TEST_CASE("omega ^ omega on C^2 has density 8 / pi^2") {
  // (i/pi)^2 (u11 v22 + u22 v11) dz1 dzb1 dz2 dzb2 with i dz dzb = 2 dx dy
  const cplx id[4] = {1.0, 0.0, 0.0, 1.0};
  CHECK(mixed_density(id, id) == doctest::Approx(8.0 / (kPi * kPi)));
  const cplx e1[4] = {1.0, 0.0, 0.0, 0.0};
  CHECK(mixed_density(e1, e1) == 0.0);
}
