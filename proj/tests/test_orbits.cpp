#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hopf/orbits.hpp"

using namespace hopf;

TEST_CASE("return map: domain and section checks") {
  CHECK_THROWS_AS(return_map(Params{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(return_map(Params{3.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("return map lands back on the section transversally") {
  const Params p{3.0, 1.0, 1.0};
  const auto r = return_map(p, {1.0, 3.0, 6.0});
  REQUIRE(r.has_value());
  CHECK(r->point[1] == Catch::Approx(3.0).margin(1e-9));
  CHECK(r->time > 0.1);
  CHECK(r->point[2] > r->point[1]);  // rising crossing: y' = k3 (z - y) > 0
}

TEST_CASE("periodic orbit at (3,1,1): closure, period, multipliers") {
  const Params p{3.0, 1.0, 1.0};
  const auto orbit = find_periodic_orbit(p, default_orbit_guess(p));

  CHECK(orbit.closure_residual < 1e-9);
  CHECK(orbit.period == Catch::Approx(7.490666).margin(1e-4));
  CHECK(orbit.section_point[1] == Catch::Approx(3.0).margin(1e-10));
  CHECK(orbit.min_component_on_orbit > 0.0);

  // Trivial multiplier 1, others strictly inside the unit circle.
  const auto ti = orbit.trivial_index();
  CHECK(std::abs(orbit.multipliers[ti] - 1.0) < 1e-6);
  CHECK(orbit.max_nontrivial_modulus() < 1.0);
  CHECK(orbit.stability == Stability::Stable);

  // Liouville: the multiplier product equals exp(-(k3+k5) T).
  CHECK(orbit.liouville_mismatch < 1e-6);
  const std::complex<double> prod =
      orbit.multipliers[0] * orbit.multipliers[1] * orbit.multipliers[2];
  CHECK(std::abs(prod - std::exp(-2.0 * orbit.period)) < 1e-8);
}

TEST_CASE("near the bifurcation the period approaches 2*pi/omega") {
  const Params p{2.05, 1.0, 1.0};  // omega = sqrt(k3 k5) = 1
  const auto orbit = find_periodic_orbit(p, default_orbit_guess(p));
  CHECK(orbit.closure_residual < 1e-9);
  CHECK(std::fabs(orbit.period - 2.0 * std::numbers::pi) / (2.0 * std::numbers::pi) < 0.1);
}

TEST_CASE("floquet multipliers are integrator-consistent") {
  const Params p{3.0, 1.0, 1.0};
  const auto orbit = find_periodic_orbit(p, default_orbit_guess(p));
  double liou = 0.0;
  IntegratorConfig tight{1e-12, 1e-14, 1.0, 20'000'000};
  const auto mults = floquet_multipliers(p, orbit.section_point, orbit.period, tight, &liou);
  CHECK(liou < 1e-8);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(mults[i] - orbit.multipliers[i]) < 1e-7);
}

TEST_CASE("census from spread-out seeds finds exactly one orbit") {
  const Params p{3.0, 1.0, 1.0};
  std::vector<std::string> failures;
  const auto census = orbit_census(p, 6, {}, {}, 1e-6, &failures);
  REQUIRE(census.size() == 1);
  CHECK(census[0].hits + static_cast<int>(failures.size()) == 6);
  CHECK(census[0].hits >= 5);
  CHECK(census[0].orbit.period == Catch::Approx(7.490666).margin(1e-4));
}

TEST_CASE("census refuses the non-oscillatory regime") {
  CHECK_THROWS_AS(orbit_census(Params{1.0, 1.0, 1.0}, 4), std::domain_error);
  CHECK_THROWS_AS(find_periodic_orbit(Params{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), std::domain_error);
}
