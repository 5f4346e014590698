#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hopf/global.hpp"

using namespace hopf;

TEST_CASE("attractor bound: closed form and domain") {
  CHECK(attractor_bound(Params{3.0, 1.0, 1.0}) == Catch::Approx(48.0));
  CHECK(attractor_bound(Params{1.0, 1.0, 1.0}) == Catch::Approx(4.0));
  CHECK_THROWS_AS(attractor_bound(Params{0.0, 1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(attractor_bound(Params{-1.0, 1.0, 1.0}), std::domain_error);
}

TEST_CASE("extremal invariant box at (3,1,1)") {
  const auto box = invariant_box_default(Params{3.0, 1.0, 1.0});
  CHECK(box.sigma == Catch::Approx(0.25));
  CHECK(box.rho == Catch::Approx(0.0625));
  CHECK(box.K == Catch::Approx(48.0));
}

TEST_CASE("box parameter validation") {
  const Params p{3.0, 1.0, 1.0};
  CHECK_NOTHROW(InvariantBox::checked(p, 0.25, 0.0625, 48.0));
  CHECK_NOTHROW(InvariantBox::checked(p, 0.1, 0.02, 200.0));
  CHECK_THROWS_AS(InvariantBox::checked(p, 0.3, 0.0625, 48.0), std::invalid_argument);
  CHECK_THROWS_AS(InvariantBox::checked(p, 0.25, 0.07, 48.0), std::invalid_argument);
  CHECK_THROWS_AS(InvariantBox::checked(p, 0.25, 0.0625, 40.0), std::invalid_argument);
}

TEST_CASE("box membership margins") {
  const InvariantBox b{0.25, 0.0625, 48.0};
  CHECK(box_contains(b, {1.0, 1.0, 1.0}));
  CHECK(box_contains(b, {0.0, 48.0, 0.0}));  // ratio constraints waived at x = 0
  CHECK_FALSE(box_contains(b, {4.0, 1.0, 0.5}));  // z/x < sigma
  CHECK_FALSE(box_contains(b, {4.0, 0.1, 2.0}));  // y/x < rho
  CHECK_FALSE(box_contains(b, {49.0, 4.0, 13.0}));
  CHECK(box_margin(b, {1.0, 1.0, 1.0}) > 0.0);
}

TEST_CASE("forward invariance of the extremal box holds on a sampled check") {
  const Params p{3.0, 1.0, 1.0};
  const auto res = verify_forward_invariance(p, invariant_box_default(p), 60, 20.0, {}, 5);
  CHECK(res.pass);
  CHECK(res.worst_margin >= -1e-9);
}

TEST_CASE("tail ratio floors hold on a trajectory") {
  const Params p{3.0, 1.0, 1.0};
  const auto r = ratio_liminf_check(p, {1.0, 1.0, 1.0}, 300.0);
  CHECK(r.pass);
  CHECK(r.z_over_x_bound == Catch::Approx(0.25));
  CHECK(r.y_over_x_bound == Catch::Approx(0.0625));
  CHECK(r.z_over_x_measured >= r.z_over_x_bound - 1e-6);
  CHECK(r.y_over_x_measured >= r.y_over_x_bound - 1e-6);
}

TEST_CASE("interior grid construction and persistence guard") {
  const auto grid = interior_grid(0.1, 10.0, 3);
  CHECK(grid.size() == 27);
  CHECK(grid.front() == Vec3{0.1, 0.1, 0.1});
  CHECK(grid.back() == Vec3{10.0, 10.0, 10.0});
  CHECK_THROWS_AS(interior_grid(0.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(persistence_floor(Params{3.0, 1.0, 1.0}, {{1e-4, 1.0, 1.0}}, 100.0),
                  std::invalid_argument);
}

TEST_CASE("persistence floor is strictly positive in the oscillatory regime") {
  const Params p{3.0, 1.0, 1.0};
  const double eta = persistence_floor(p, interior_grid(0.5, 5.0, 2), 200.0);
  CHECK(eta > 0.0);
  CHECK(eta < 3.0);
}

TEST_CASE("unstable manifold of the origin reaches E below the bifurcation") {
  const Params p{1.0, 1.0, 1.0};
  const auto trace = trace_unstable_manifold_origin(p, 1e-7);
  CHECK(trace.settled);
  CHECK(trace.limit_kind == LimitKind::Equilibrium);
  CHECK(norm(trace.limit_point - Vec3{1.0, 1.0, 1.0}) < 1e-12);
  // C starts at the origin side and stays interior.
  CHECK(min_component(trace.trajectory.states.front()) > 0.0);
}

TEST_CASE("unstable manifold of the origin settles on an orbit above the bifurcation") {
  const Params p{3.0, 1.0, 1.0};
  const auto trace = trace_unstable_manifold_origin(p, 1e-7);
  CHECK(trace.settled);
  CHECK(trace.limit_kind == LimitKind::PeriodicOrbit);
  CHECK(trace.limit_point[1] == Catch::Approx(3.0).margin(1e-8));  // on the section y = k
  CHECK(trace.min_distance_to_E_tail > 0.1);
}

TEST_CASE("stable manifold branches of E: geometry audit at (3,1,1)") {
  const Params p{3.0, 1.0, 1.0};
  const auto sm = trace_stable_manifold_E(p, 1e-7);

  CHECK(sm.upper.valid());
  CHECK(sm.lower.valid());
  CHECK(sm.upper.worst_monotonicity_violation <= 1e-9);
  CHECK(sm.lower.worst_monotonicity_violation <= 1e-9);
  CHECK(sm.upper.forward_terminal_distance_to_E < 1e-8);
  CHECK(sm.lower.forward_terminal_distance_to_E < 1e-8);

  // Endpoint structure: p_u leaves through y = 0 with 0 < x < k < z,
  // p_l through z = 0 with x, y > k.
  const Vec3& up = sm.upper.boundary_endpoint;
  CHECK(std::fabs(up[1]) < 1e-9);
  CHECK(up[0] > 0.0);
  CHECK(up[0] < 3.0);
  CHECK(up[2] > 3.0);
  const Vec3& lo = sm.lower.boundary_endpoint;
  CHECK(std::fabs(lo[2]) < 1e-9);
  CHECK(lo[0] > 3.0);
  CHECK(lo[1] > 3.0);

  CHECK_THROWS_AS(trace_stable_manifold_E(Params{1.0, 1.0, 1.0}, 1e-7), std::domain_error);
  CHECK_THROWS_AS(trace_stable_manifold_E(p, 1e-3), std::invalid_argument);
}
