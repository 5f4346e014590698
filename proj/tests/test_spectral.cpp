#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>

#include "hopf/model.hpp"
#include "hopf/spectral.hpp"

using namespace hopf;

namespace {

double root_set_distance(const std::array<std::complex<double>, 3>& got,
                         const std::array<std::complex<double>, 3>& want) {
  // Max over wanted roots of the distance to the closest computed root.
  double worst = 0.0;
  for (const auto& w : want) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : got) best = std::min(best, std::abs(g - w));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("cubic roots: three distinct real roots") {
  // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
  const auto sp = cubic_roots({-6.0, 11.0, -6.0});
  CHECK(root_set_distance(sp.roots, {{{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}}}) < 1e-12);
  CHECK(sp.tag == SpectrumTag::HasPositiveRealPart);
}

TEST_CASE("cubic roots: complex conjugate pair") {
  // (x+1)(x^2+2x+5): roots -1, -1 +- 2i
  const auto sp = cubic_roots({3.0, 7.0, 5.0});
  CHECK(root_set_distance(sp.roots, {{{-1.0, 0.0}, {-1.0, 2.0}, {-1.0, -2.0}}}) < 1e-12);
  CHECK(sp.tag == SpectrumTag::AllNegativeRealParts);
}

TEST_CASE("cubic roots: triple root") {
  // (x+2)^3 = x^3 + 6x^2 + 12x + 8
  const auto sp = cubic_roots({6.0, 12.0, 8.0});
  // A triple root is ill-conditioned; errors scale like eps^(1/3).
  CHECK(root_set_distance(sp.roots, {{{-2.0, 0.0}, {-2.0, 0.0}, {-2.0, 0.0}}}) < 1e-4);
}

TEST_CASE("characteristic polynomial at the interior equilibrium") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Params p{u(rng), u(rng), u(rng)};
    const CubicCoeffs c = char_poly(jacobian(p, interior_equilibrium(p)));
    CHECK(c.c2 == Catch::Approx(p.k3 + p.k5).margin(1e-12));
    CHECK(c.c1 == Catch::Approx(p.k3 * p.k5).margin(1e-12));
    CHECK(c.c0 == Catch::Approx(p.k * p.k3 * p.k5).margin(1e-12));
    // The roots satisfy the polynomial.
    const auto sp = cubic_roots(c);
    for (const auto& r : sp.roots)
      CHECK(std::abs(c.eval(r)) < 1e-9 * std::max(1.0, std::pow(sp.spectral_radius(), 3)));
  }
}

TEST_CASE("Routh-Hurwitz agrees with the eigenvalue tag on random parameters") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Params p{u(rng), u(rng), u(rng)};
    // Skip near-marginal parameter draws where both answers legitimately flip.
    if (std::fabs(p.k - (p.k3 + p.k5)) < 1e-6) continue;
    const auto cls = classify_equilibrium(p, interior_equilibrium(p));
    REQUIRE(cls.stability != Stability::Marginal);
    CHECK(cls.routh_hurwitz_stable == (cls.stability == Stability::Stable));
    CHECK((cls.stability == Stability::Stable) == (p.k < p.k3 + p.k5));
    ++checked;
  }
  CHECK(checked > 450);
}

TEST_CASE("classify_equilibrium rejects non-equilibria") {
  const Params p{3.0, 1.0, 1.0};
  CHECK_THROWS_AS(classify_equilibrium(p, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("origin stability flips at k = 0") {
  CHECK(classify_equilibrium(Params{-0.5, 1.0, 1.0}, {0, 0, 0}).stability == Stability::Stable);
  CHECK(classify_equilibrium(Params{0.5, 1.0, 1.0}, {0, 0, 0}).stability == Stability::Unstable);
}

TEST_CASE("hopf point location and frequency") {
  const auto hp = hopf_point(1.0, 1.0);
  CHECK(hp.k_h == 2.0);
  CHECK(hp.omega == 1.0);
  const auto hp2 = hopf_point(0.5, 2.0);
  CHECK(hp2.k_h == 2.5);
  CHECK(hp2.omega == Catch::Approx(1.0));
  CHECK_THROWS_AS(hopf_point(0.0, 1.0), std::invalid_argument);

  // At k = k_h the spectrum of E holds a pure imaginary pair at +-i*omega.
  const Params p{2.0, 1.0, 1.0};
  const auto sp = eigenvalues(jacobian(p, interior_equilibrium(p)));
  double best = 1e9;
  for (const auto& r : sp.roots) best = std::min(best, std::abs(r - std::complex<double>(0.0, 1.0)));
  CHECK(best < 1e-10);
}

TEST_CASE("stable eigenpair of E in the oscillatory regime") {
  const Params p{3.0, 1.0, 1.0};
  const auto pair = stable_eigenpair_at_E(p);
  CHECK(pair.eigenvalue < 0.0);
  // Sign pattern (+, +, -) with unit norm and positive x component.
  CHECK(pair.eigenvector[0] > 0.0);
  CHECK(pair.eigenvector[1] > 0.0);
  CHECK(pair.eigenvector[2] < 0.0);
  CHECK(norm(pair.eigenvector) == Catch::Approx(1.0).margin(1e-14));
  // Direction matches (1, 0.7249, -0.8513) up to normalization.
  const double scale = 1.0 / pair.eigenvector[0];
  CHECK(scale * pair.eigenvector[1] == Catch::Approx(0.7249).margin(5e-4));
  CHECK(scale * pair.eigenvector[2] == Catch::Approx(-0.8513).margin(5e-4));
  // Residual of the eigen equation.
  const Mat3 j = jacobian(p, interior_equilibrium(p));
  const Vec3 r = j * pair.eigenvector - pair.eigenvalue * pair.eigenvector;
  CHECK(norm(r) < 1e-12);
  CHECK_THROWS_AS(stable_eigenpair_at_E(Params{1.0, 1.0, 1.0}), std::domain_error);
}

TEST_CASE("unstable eigenvector at the origin") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Params p{u(rng), u(rng), u(rng)};
    const Vec3 v = unstable_eigenvector_at_origin(p);
    CHECK(min_component(v) > 0.0);
    const Vec3 r = jacobian(p, {0, 0, 0}) * v - p.k * v;
    CHECK(norm(r) < 1e-13);
  }
  CHECK_THROWS_AS(unstable_eigenvector_at_origin(Params{-1.0, 1.0, 1.0}), std::domain_error);
}
