#include <doctest.h>

#include <cmath>
#include <memory>

#include "crdisc/family.hpp"

using namespace crd;

namespace {

std::shared_ptr<BishopProblem> problem(const char* man, int d) {
  static const SeedFunction s = construct_seed({});
  return std::make_shared<BishopProblem>(GraphManifold::from_spec(man, d, {}, 0), s, 128);
}

DiscFamily family(const char* man, int d, double t) {
  FamilyOptions fo;
  fo.t = t;
  return build_family(problem(man, d), fo);
}

}  // namespace

TEST_CASE("fit_loglog recovers a power law") {
  std::vector<double> x, y;
  for (int i = 0; i < 8; ++i) {
    x.push_back(std::pow(2.0, -i));
    y.push_back(3.0 * std::pow(x.back(), 1.7));
  }
  const SlopeFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
}

TEST_CASE("tau grid sizes") {
  CHECK(tau_grid(1, 3, 0.5).size() == 1);
  CHECK(tau_grid(2, 3, 0.5).size() == 9);
}

TEST_CASE("boundary arc lands on the graph") {
  for (const char* man : {"zero", "quadratic"}) {
    const DiscFamily fam = family(man, 1, 0.1);
    const AttachmentReport a = verify_attachment(fam, 61);
    CHECK(a.residual <= 10.0 * a.truncation);
  }
}

TEST_CASE("discs are holomorphic") {
  const DiscFamily fam = family("quadratic", 2, 0.08);
  CHECK(cauchy_riemann_residual(fam, 4, 16) < 1e-9);
}

TEST_CASE("jacobian and distance ratios stay positive near the arc") {
  const DiscFamily fam = family("quadratic", 2, 0.08);
  RegionGrid rg;
  const RatioRange j = verify_jacobian_bound(fam, rg, 1e-3);
  const RatioRange d = verify_distance_bounds(fam, rg);
  CHECK(j.min > 0.0);
  CHECK(d.min > 0.0);
  CHECK(std::isfinite(d.max));
}

TEST_CASE("flat graph distance ratio is bounded below by half c_u0") {
  const DiscFamily fam = family("zero", 1, 0.1);
  const RatioRange d = verify_distance_bounds(fam, RegionGrid{});
  CHECK(d.min >= 0.5 * fam.problem().seed().c_u0);
}

TEST_CASE("jacobian degenerates linearly at d = 2") {
  const DiscFamily fam = family("zero", 2, 0.08);
  const SlopeFit s = degeneration_slope(fam, 1e-3, 1e-1, 10, 1e-3);
  CHECK(std::abs(s.slope - 1.0) <= 0.15);
}

TEST_CASE("boundary image is injective") {
  const DiscFamily fam = family("quadratic", 2, 0.08);
  const CoverageReport c = boundary_coverage(fam, {0.0}, 31, 15);
  CHECK(c.injective);
  CHECK(c.radius > 0.0);
}
