#include <doctest.h>

#include <cmath>
#include <random>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"
#include "crdisc/exponent.hpp"

using namespace crd;

namespace {

ExponentOptions quick() {
  ExponentOptions o;
  o.chain = false;
  return o;
}

}  // namespace

TEST_CASE("sweep parsing") {
  const auto a = parse_sweep("2:3:0.5");
  REQUIRE(a.size() == 3);
  CHECK(a[2] == doctest::Approx(3.0));
  CHECK(parse_sweep("1,4").size() == 2);
  CHECK(default_sweep().size() == 13);
  CHECK_THROWS_AS(parse_sweep("2:1:0.5"), Error);
  CHECK_THROWS_AS(parse_sweep("a,b"), Error);
}

TEST_CASE("pairs are ordered") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d : {1, 2}) {
    const auto m = GraphManifold::from_spec("quadratic", d, {}, 0);
    for (const auto& name : kExponentFamilies) {
      const PairFamily f = make_pair_family(name, m, 3);
      for (int i = 0; i < 200; ++i) {
        std::vector<cplx> z(d);
        for (auto& c : z) c = 0.05 * cplx(u(rng), u(rng));
        CHECK(f.difference(z.data(), 3.0) >= 0.0);
      }
    }
  }
}

TEST_CASE("zero gap gives zero integrals") {
  const auto m = GraphManifold::zero(1);
  const PairFamily f = make_pair_family("trunc-log", m, 1, 0.0);
  CHECK(pair_plane_l1(f, 3.0, 16) == 0.0);
  CHECK(pair_trace_integral(f, m, 3.0, 16) == 0.0);
}

TEST_CASE("closed forms of the truncated log pair on the flat slice") {
  for (int d : {1, 2}) {
    const auto m = GraphManifold::zero(d);
    const PairFamily f = make_pair_family("trunc-log", m, 1);
    const double M = 3.0, a = std::exp(-M), b = std::exp(-M - 2.0);
    const double sigma = d == 1 ? 2 * kPi : 2 * kPi * kPi;
    const double x = sigma / (4.0 * d * d) * (std::exp(-2.0 * d * M) - std::exp(-2.0 * d * (M + 2.0)));
    const double y = d == 1 ? 2.0 * (a - b) : kPi / 2.0 * (a * a - b * b);
    CHECK(pair_plane_l1(f, M, 16) == doctest::Approx(x).epsilon(0.01));
    CHECK(pair_trace_integral(f, m, M, 16) == doctest::Approx(y).epsilon(0.01));
  }
}

TEST_CASE("a pair off K' has no trace once its support shrinks below the distance") {
  const auto m = GraphManifold::zero(1);
  const PairFamily f = make_pair_family("trunc-log-off", m, 1);
  const double M = -std::log(kOffDistance) + 0.5;
  CHECK(pair_trace_integral(f, m, M, 16) == 0.0);
  CHECK(pair_plane_l1(f, M, 16) > 0.0);
}

TEST_CASE("scaling the difference scales both integrals") {
  const auto m = GraphManifold::from_spec("quadratic", 1, {}, 0);
  PairFamily f = make_pair_family("smooth-log", m, 1);
  const double x = pair_plane_l1(f, 3.0, 16), y = pair_trace_integral(f, m, 3.0, 16);
  f.scale = 3.7;
  CHECK(pair_plane_l1(f, 3.0, 16) == doctest::Approx(3.7 * x).epsilon(1e-12));
  CHECK(pair_trace_integral(f, m, 3.0, 16) == doctest::Approx(3.7 * y).epsilon(1e-12));
}

TEST_CASE("truncated log on K' at d = 1 has slope one half") {
  const auto m = GraphManifold::from_spec("quadratic", 1, {}, 0);
  const ExponentExperiment e = run_exponent_experiment(m, "trunc-log", parse_sweep("2:6:1"), 1, quick());
  CHECK(e.fit.slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(e.fit.slope > 1.0 / 3.0);
  CHECK(e.monotone);
  CHECK(e.scale_error <= 1e-9);
  CHECK(e.pass);
}

TEST_CASE("seeded families are reproducible") {
  const auto m = GraphManifold::from_spec("quadratic", 2, {}, 0);
  const PairFamily a = make_pair_family("trunc-log-sum", m, 9), b = make_pair_family("trunc-log-sum", m, 9);
  const PairFamily c = make_pair_family("trunc-log-sum", m, 10);
  REQUIRE(a.terms.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a.terms[i].centre == b.terms[i].centre);
  CHECK(a.terms[0].centre != c.terms[0].centre);
}

TEST_CASE("unknown families are rejected") {
  CHECK_THROWS_AS(make_pair_family("nope", GraphManifold::zero(1), 1), Error);
}
