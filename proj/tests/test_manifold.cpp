#include <doctest.h>

#include <cmath>

#include "crdisc/errors.hpp"
#include "crdisc/manifold.hpp"

using namespace crd;

TEST_CASE("graphs are normalized at the origin") {
  for (const char* fam : {"zero", "quadratic", "trig", "poly"})
    for (int d : {1, 2}) {
      const auto m = GraphManifold::from_spec(fam, d, {}, 0);
      std::vector<double> x(d, 0.0), h(d), dh(d * d);
      m.h(x.data(), h.data());
      m.dh(x.data(), dh.data());
      for (double v : h) CHECK(std::abs(v) < 1e-15);
      for (double v : dh) CHECK(std::abs(v) < 1e-15);
    }
}

TEST_CASE("evaluation outside the unit ball is a domain error") {
  const auto m = GraphManifold::from_spec("quadratic", 1, {}, 0);
  const double x = 1.5;
  double h = 0;
  CHECK_THROWS_AS(m.h(&x, &h), Error);
}

TEST_CASE("the zero graph gives |Im z|") {
  const auto m = GraphManifold::zero(2);
  const std::vector<cplx> z{cplx(0.2, 0.1), cplx(-0.3, -0.4)};
  CHECK(surrogate_distance(m, z) == doctest::Approx(std::hypot(0.1, 0.4)));
  CHECK(true_distance(m, z) == doctest::Approx(std::hypot(0.1, 0.4)).epsilon(1e-8));
}

TEST_CASE("surrogate and true distance are comparable") {
  const auto m = GraphManifold::from_spec("quadratic", 2, {}, 0);
  const DistanceCalibration c = calibrate_distance(m, 0.5, 0.1, 64, 7);
  CHECK(c.min_ratio > 0.0);
  CHECK(std::isfinite(c.constant));
  CHECK(c.constant < 3.0);
}

TEST_CASE("surrogate tube volume over the flat slice is the slab volume") {
  const auto m = GraphManifold::zero(1);
  TubeSpec t;
  t.epsilon = 0.1;
  t.base_radius = 0.5;
  const TubeSamples s = sample_tube(m, t, 20000, 3);
  const double exact = 1.0 * 0.2;
  CHECK(s.volume_estimate() == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(3.141592653589793));
}
