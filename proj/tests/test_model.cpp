#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hopf/model.hpp"
#include "hopf/spectral.hpp"

using namespace hopf;

TEST_CASE("vector field at sample points") {
  const Params p{3.0, 1.0, 1.0};
  const Vec3 f = vector_field(p, {2.0, 1.0, 4.0});
  CHECK(f[0] == Catch::Approx(3.0 * 2.0 - 2.0 * 1.0));
  CHECK(f[1] == Catch::Approx(4.0 - 1.0));
  CHECK(f[2] == Catch::Approx(2.0 - 4.0));

  // Both equilibria are fixed points of the field.
  for (const Vec3& e : equilibria(p)) CHECK(norm_inf(vector_field(p, e)) == 0.0);
}

TEST_CASE("jacobian matches central finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Params p{u(rng) - 1.0, u(rng), u(rng)};
    const Vec3 s{u(rng), u(rng), u(rng)};
    const Mat3 j = jacobian(p, s);
    const double h = 1e-6;
    for (std::size_t col = 0; col < 3; ++col) {
      Vec3 sp = s, sm = s;
      sp[col] += h;
      sm[col] -= h;
      const Vec3 df = (1.0 / (2.0 * h)) * (vector_field(p, sp) - vector_field(p, sm));
      for (std::size_t row = 0; row < 3; ++row)
        CHECK(j(row, col) == Catch::Approx(df[row]).margin(1e-7));
    }
  }
}

TEST_CASE("second additive compound has trace 2*tr(Df) and the right entries") {
  const Params p{3.0, 1.0, 2.0};
  const Vec3 s{1.5, 0.5, 2.5};
  const Mat3 c = second_additive_compound(p, s);
  CHECK(c.trace() == Catch::Approx(2.0 * jacobian(p, s).trace()));
  CHECK(c(0, 0) == Catch::Approx(p.k - s[1] - p.k3));
  CHECK(c(0, 1) == Catch::Approx(p.k3));
  CHECK(c(1, 1) == Catch::Approx(p.k - s[1] - p.k5));
  CHECK(c(1, 2) == Catch::Approx(-s[0]));
  CHECK(c(2, 0) == Catch::Approx(-p.k5));
  CHECK(c(2, 2) == Catch::Approx(-(p.k3 + p.k5)));
}

TEST_CASE("scaling reduces the original system to the normalized one") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const OriginalParams op{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto [p, sf] = scale_from_original(op);
    CHECK(p.k == Catch::Approx(op.k1 * op.A - op.k4).margin(1e-14));
    const Vec3 sbar{u(rng), u(rng), u(rng)};
    const Vec3 s{sf.a * sbar[0], sf.b * sbar[1], sf.c * sbar[2]};
    const Vec3 f_orig = vector_field_original(op, s);
    const Vec3 f_scaled = vector_field(p, sbar);
    CHECK(std::fabs(f_orig[0] / sf.a - f_scaled[0]) < 1e-12 * std::max(1.0, std::fabs(f_scaled[0])));
    CHECK(std::fabs(f_orig[1] / sf.b - f_scaled[1]) < 1e-12 * std::max(1.0, std::fabs(f_scaled[1])));
    CHECK(std::fabs(f_orig[2] / sf.c - f_scaled[2]) < 1e-12 * std::max(1.0, std::fabs(f_scaled[2])));
  }
}

TEST_CASE("equilibria depend on the sign of k") {
  CHECK(equilibria(Params{-1.0, 1.0, 1.0}).size() == 1);
  const auto eq = equilibria(Params{3.0, 1.0, 1.0});
  REQUIRE(eq.size() == 2);
  CHECK(eq[1] == Vec3{3.0, 3.0, 3.0});
  CHECK_THROWS_AS(interior_equilibrium(Params{0.0, 1.0, 1.0}), std::domain_error);
}

TEST_CASE("regime classification with boundary tolerance") {
  CHECK(classify_regime(Params{-0.5, 1.0, 1.0}) == Regime::GlobalDecay);
  CHECK(classify_regime(Params{0.0, 1.0, 1.0}) == Regime::GlobalDecay);
  CHECK(classify_regime(Params{1.0, 1.0, 1.0}) == Regime::StableInterior);
  CHECK(classify_regime(Params{3.0, 1.0, 1.0}) == Regime::Oscillatory);
  CHECK(classify_regime(Params{2.0, 1.0, 1.0}) == Regime::HopfBoundary);
  CHECK(classify_regime(Params{2.0 + 1e-10, 1.0, 1.0}) == Regime::HopfBoundary);
  CHECK(classify_regime(Params{2.0 + 1e-7, 1.0, 1.0}) == Regime::Oscillatory);
  CHECK(std::string(to_string(Regime::Oscillatory)) == "oscillatory");
}

TEST_CASE("validation rejects bad inputs") {
  CHECK_THROWS_AS(Params({1.0, -1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Params({1.0, 1.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(OriginalParams({1.0, 0.0, 1.0, 1.0, 1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(OriginalParams({1.0, 1.0, 1.0, 1.0, 1.0, -0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(State::checked(1.0, -1e-9, 0.0), std::invalid_argument);
  CHECK(State::checked(1.0, 0.0, 2.0).z() == 2.0);
}
