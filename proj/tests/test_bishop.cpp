#include <doctest.h>

#include <cmath>

#include "crdisc/bishop.hpp"
#include "crdisc/errors.hpp"

using namespace crd;

namespace {

const SeedFunction& seed() {
  static const SeedFunction s = construct_seed({});
  return s;
}

}  // namespace

TEST_CASE("flat graph: one iteration onto the closed form") {
  for (int d : {1, 2}) {
    const BishopProblem prob(GraphManifold::zero(d), seed(), 128);
    for (const auto& p : reference_params(d, 0.1)) {
      const BishopSolution s = prob.solve(p, {});
      CHECK(s.iterations <= 1);
      const auto lin = prob.linear_part(p);
      for (int j = 0; j < d; ++j) CHECK(sup_norm({s.U[j] - lin[j]}, 512) < 1e-13);
    }
  }
}

TEST_CASE("U(1) = t tau2* on the curved graph") {
  const BishopProblem prob(GraphManifold::from_spec("quadratic", 2, {}, 0), seed(), 128);
  for (const auto& p : reference_params(2, 0.08)) {
    const BishopSolution s = prob.solve(p, {});
    CHECK(s.residual <= 1e-10);
    const auto tau2 = p.tau2_star();
    for (int j = 0; j < 2; ++j) CHECK(std::abs(s.U[j](0.0) - p.t * tau2[j]) < 1e-12);
  }
}

TEST_CASE("the defect of a solution is its residual") {
  const BishopProblem prob(GraphManifold::from_spec("quadratic", 1, {}, 0), seed(), 128);
  DiscParams p;
  p.t = 0.1;
  const BishopSolution s = prob.solve(p, {});
  CHECK(prob.defect(s.U, p, prob.grid()) <= 1e-11);
}

TEST_CASE("the solution norm is linear in t for small t") {
  const BishopProblem prob(GraphManifold::from_spec("quadratic", 1, {}, 0), seed(), 128);
  DiscParams a, b;
  a.t = 0.02;
  b.t = 0.01;
  const double ra = sup_norm(prob.solve(a, {}).U, 512) / a.t;
  const double rb = sup_norm(prob.solve(b, {}).U, 512) / b.t;
  CHECK(std::abs(ra - rb) / rb < 0.01);
}

TEST_CASE("bad parameters are rejected") {
  DiscParams p;
  p.tau1 = {0.1};
  CHECK_THROWS_AS(p.validate(1), Error);
  p.tau1 = {};
  p.t = -0.1;
  CHECK_THROWS_AS(p.validate(1), Error);
}

TEST_CASE("t_max is found and the cap is respected") {
  const BishopProblem prob(GraphManifold::from_spec("quadratic", 1, {}, 0), seed(), 128);
  const TmaxResult r = find_t_max(prob, {}, 0.999, 12);
  CHECK(r.t_max > 0.05);
  CHECK(r.t_max <= 0.999);
}
