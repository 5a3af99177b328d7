#include <doctest.h>

#include <cmath>

#include "crdisc/seed.hpp"

using namespace crd;

TEST_CASE("smooth step is flat at both ends") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(smooth_step(1e-3) < 1e-100);
}

TEST_CASE("default seed certifies") {
  const SeedFunction s = construct_seed({});
  CHECK(s.derivative_residual <= 1e-8);
  CHECK(s.arc_residual <= 1e-10);
  CHECK(s.c_u0 > 0.0);
  // both routes to d/dx u0(1)
  const double quad = boundary_x_derivative_integral(synthesize(s.u0, 1024));
  CHECK(quad == doctest::Approx(boundary_x_derivative_spectral(s.u0)).epsilon(1e-9));
}

TEST_CASE("u0 is nonnegative and positive inside") {
  const SeedFunction s = construct_seed({});
  for (double v : synthesize(s.u0, 2048)) CHECK(v > -1e-12);
  const HarmonicField P = poisson_extend(s.u0);
  for (double r : {0.1, 0.5, 0.9, 0.99})
    for (int k = 0; k < 16; ++k) CHECK(P(std::polar(r, 2.0 * 3.141592653589793 * k / 16)) > 0.0);
}

TEST_CASE("vanishing arc boundary behaviour is linear in 1 - |z|") {
  const SeedFunction s = construct_seed({});
  const HarmonicField P = poisson_extend(s.u0);
  // u(r) / (1 - r) -> -d/dx u(1) = 1 at theta = 0, with an O(1 - r) defect
  const double e1 = std::abs(P(cplx(1 - 1e-2, 0)) / 1e-2 - 1.0);
  const double e2 = std::abs(P(cplx(1 - 5e-3, 0)) / 5e-3 - 1.0);
  CHECK(e2 < 0.6 * e1);
}

TEST_CASE("c_u0 is stable under grid doubling") {
  SeedOptions a, b;
  b.grid = 2 * a.grid;
  const double ca = construct_seed(a).c_u0, cb = construct_seed(b).c_u0;
  CHECK(std::abs(cb - ca) / ca <= 0.05);
}
