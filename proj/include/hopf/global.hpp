#ifndef HOPF_GLOBAL_HPP
#define HOPF_GLOBAL_HPP

// Global dynamics machinery: the attractor bound M, the positively invariant
// sets B_(sigma,rho,K), ratio lower bounds, uniform persistence estimation,
// and tracing of the one-dimensional invariant manifolds (unstable manifold
// of the origin, stable manifold of E).

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopf/integrate.hpp"
#include "hopf/model.hpp"
#include "hopf/report.hpp"
#include "hopf/spectral.hpp"

namespace hopf {

/// Every solution eventually enters [0, M]^3 when k > 0. For k <= 0 the
/// attractor is the origin and no finite box bound applies; signaled by throw.
inline double attractor_bound(const Params& p) {
  p.validate();
  if (!(p.k > 0.0))
    throw std::domain_error("attractor_bound: for k <= 0 the attractor is {0}");
  return p.k * (p.k + p.k5) * (p.k + p.k3) / (p.k3 * p.k5);
}

/// The set B = { s in [0,K]^3 : x = 0, or z/x >= sigma and y/x >= rho }.
struct InvariantBox {
  double sigma, rho, K;

  static InvariantBox checked(const Params& p, double sigma, double rho, double K) {
    p.validate();
    if (!(p.k > 0.0)) throw std::domain_error("InvariantBox: requires k > 0");
    const double sigma_max = p.k5 / (p.k + p.k5);
    const double rho_max = p.k3 * sigma / (p.k + p.k3);
    if (!(sigma > 0.0 && sigma <= sigma_max))
      throw std::invalid_argument("InvariantBox: need 0 < sigma <= k5/(k+k5)");
    if (!(rho > 0.0 && rho <= rho_max))
      throw std::invalid_argument("InvariantBox: need 0 < rho <= k3*sigma/(k+k3)");
    if (!(K >= p.k / rho)) throw std::invalid_argument("InvariantBox: need K >= k/rho");
    return InvariantBox{sigma, rho, K};
  }
};

/// The extremal valid box; its cap K = k/rho coincides with M.
inline InvariantBox invariant_box_default(const Params& p) {
  p.validate();
  if (!(p.k > 0.0)) throw std::domain_error("invariant_box_default: requires k > 0");
  const double sigma = p.k5 / (p.k + p.k5);
  const double rho = p.k3 * sigma / (p.k + p.k3);
  return InvariantBox{sigma, rho, p.k / rho};
}

/// Signed membership margin: nonnegative iff s is in the box. The ratio
/// constraints are waived on the x = 0 face.
inline double box_margin(const InvariantBox& b, const Vec3& s) {
  double m = std::min({s[0], s[1], s[2], b.K - s[0], b.K - s[1], b.K - s[2]});
  if (s[0] > 0.0) m = std::min({m, s[2] / s[0] - b.sigma, s[1] / s[0] - b.rho});
  return m;
}

inline bool box_contains(const InvariantBox& b, const Vec3& s) { return box_margin(b, s) >= 0.0; }

struct InvarianceResult {
  double worst_margin;  // min over samples and times of box_margin
  int n_samples;
  bool pass;  // worst_margin >= -slack
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// A random point of the box; with probability 1/2 placed within relative
/// distance `edge` of one of the active boundary pieces, where invariance can
/// only fail.
inline Vec3 sample_box_point(const InvariantBox& b, std::mt19937_64& rng, double edge = 1e-3) {
  const double x = uniform(rng, 1e-3 * b.K, b.K);
  const double z = uniform(rng, b.sigma * x, b.K);
  const double y = uniform(rng, b.rho * x, b.K);
  Vec3 s{x, y, z};
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    switch (static_cast<int>(uniform(rng, 0.0, 5.0))) {
      case 0: s[2] = b.sigma * x * (1.0 + edge * uniform(rng, 0.0, 1.0)); break;
      case 1: s[1] = b.rho * x * (1.0 + edge * uniform(rng, 0.0, 1.0)); break;
      case 2: s[0] = b.K * (1.0 - edge * uniform(rng, 0.0, 1.0));
              s[1] = std::max(s[1], b.rho * s[0]);
              s[2] = std::max(s[2], b.sigma * s[0]);
              break;
      case 3: s[1] = b.K * (1.0 - edge * uniform(rng, 0.0, 1.0)); break;
      default: s[2] = b.K * (1.0 - edge * uniform(rng, 0.0, 1.0)); break;
    }
  }
  return s;
}

}  // namespace detail

/// Integrates boundary-stratified samples of the box and measures the worst
/// membership margin along each trajectory.
inline InvarianceResult verify_forward_invariance(const Params& p, const InvariantBox& b,
                                                  int n_samples, double t_check,
                                                  const IntegratorConfig& cfg = {},
                                                  std::uint64_t seed = 0,
                                                  double slack = 1e-9) {
  p.validate();
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  const int n_time = 200;
  for (int i = 0; i < n_samples; ++i) {
    const Vec3 s0 = detail::sample_box_point(b, rng);
    const Trajectory traj = integrate(p, s0, t_check, cfg);
    for (int j = 0; j <= n_time; ++j) {
      const double t = t_check * static_cast<double>(j) / n_time;
      worst = std::min(worst, box_margin(b, traj.at(t)));
    }
  }
  return {worst, n_samples, worst >= -slack};
}

struct RatioFloors {
  double z_over_x_measured, y_over_x_measured;  // tail infima
  double z_over_x_bound, y_over_x_bound;        // k5/(k+k5), k3k5/((k+k3)(k+k5))
  bool pass;
};

/// Tail infima of z/x and y/x against the liminf bounds from the proof of the
/// attractor theorem.
inline RatioFloors ratio_liminf_check(const Params& p, const Vec3& s0, double horizon,
                                      const IntegratorConfig& cfg = {}) {
  p.validate();
  if (!(p.k > 0.0)) throw std::domain_error("ratio_liminf_check: requires k > 0");
  if (!(s0[0] > 0.0)) throw std::invalid_argument("ratio_liminf_check: requires x(0) > 0");
  const Trajectory traj = integrate(p, s0, horizon, cfg);
  double inf_zx = std::numeric_limits<double>::infinity();
  double inf_yx = inf_zx;
  const int n = 2000;
  for (int j = 0; j <= n; ++j) {
    const double t = horizon / 2.0 + (horizon / 2.0) * static_cast<double>(j) / n;
    const Vec3 s = traj.at(t);
    if (s[0] <= 0.0) continue;
    inf_zx = std::min(inf_zx, s[2] / s[0]);
    inf_yx = std::min(inf_yx, s[1] / s[0]);
  }
  const double zb = p.k5 / (p.k + p.k5);
  const double yb = p.k3 * p.k5 / ((p.k + p.k3) * (p.k + p.k5));
  return {inf_zx, inf_yx, zb, yb, inf_zx >= zb - 1e-6 && inf_yx >= yb - 1e-6};
}

/// Uniform 3D grid of strictly interior starting points.
inline std::vector<Vec3> interior_grid(double lo, double hi, int n_per_axis) {
  if (!(lo > 0.0 && hi > lo && n_per_axis >= 1))
    throw std::invalid_argument("interior_grid: need 0 < lo < hi and n >= 1");
  std::vector<Vec3> grid;
  grid.reserve(static_cast<std::size_t>(n_per_axis) * n_per_axis * n_per_axis);
  auto coord = [&](int i) {
    return n_per_axis == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n_per_axis - 1);
  };
  for (int i = 0; i < n_per_axis; ++i)
    for (int j = 0; j < n_per_axis; ++j)
      for (int l = 0; l < n_per_axis; ++l) grid.push_back({coord(i), coord(j), coord(l)});
  return grid;
}

/// Empirical uniform-persistence floor: the smallest tail infimum of
/// min(x,y,z) over the given interior starts.
inline double persistence_floor(const Params& p, const std::vector<Vec3>& starts, double horizon,
                                const IntegratorConfig& cfg = {}) {
  p.validate();
  if (!(p.k > 0.0)) throw std::domain_error("persistence_floor: requires k > 0");
  double eta = std::numeric_limits<double>::infinity();
  const int n = 2000;
  for (const Vec3& s0 : starts) {
    if (!(min_component(s0) > 1e-3))
      throw std::invalid_argument("persistence_floor: starts must be strictly interior (>= 1e-3)");
    const Trajectory traj = integrate(p, s0, horizon, cfg);
    for (int j = 0; j <= n; ++j) {
      const double t = horizon / 2.0 + (horizon / 2.0) * static_cast<double>(j) / n;
      eta = std::min(eta, min_component(traj.at(t)));
    }
  }
  return eta;
}

enum class LimitKind { Equilibrium, PeriodicOrbit };

struct UnstableManifoldTrace {
  Trajectory trajectory;  // the connecting orbit C, from near 0 to the limit object
  LimitKind limit_kind;
  Vec3 limit_point;       // E, or a point on the limiting periodic orbit
  double settle_time;     // first time the tail is within tolerance of the limit
  double min_distance_to_E_tail;  // over [settle_time/2, end]
  bool settled;
};

/// Follows the unstable manifold of the origin forward from delta * v, where v
/// is the positive eigenvector of Df(0) for eigenvalue k.
inline UnstableManifoldTrace trace_unstable_manifold_origin(const Params& p, double delta,
                                                            const IntegratorConfig& cfg = {},
                                                            double max_horizon = 3000.0,
                                                            double settle_tol = 1e-6) {
  p.validate();
  if (!(p.k > 0.0)) throw std::domain_error("trace_unstable_manifold_origin: requires k > 0");
  if (!(delta > 0.0 && delta <= 1e-6))
    throw std::invalid_argument("trace_unstable_manifold_origin: need 0 < delta <= 1e-6");

  const Vec3 v = unstable_eigenvector_at_origin(p);
  const Vec3 s0 = delta * v;
  const Regime regime = classify_regime(p);

  UnstableManifoldTrace out;
  out.settled = false;

  if (regime == Regime::StableInterior || regime == Regime::HopfBoundary) {
    const Vec3 e = interior_equilibrium(p);
    std::vector<EventSpec<3>> events(1);
    events[0].g = [e, settle_tol](const Vec3& s) {
      const Vec3 d = s - e;
      return dot(d, d) - settle_tol * settle_tol;
    };
    events[0].direction = EventSpec<3>::Direction::Falling;
    events[0].terminal = true;
    auto [traj, hits] = integrate_with_events(p, s0, max_horizon, cfg, events);
    out.settled = traj.status == IntegrateStatus::TerminalEvent;
    out.settle_time = traj.t_end();
    out.limit_kind = LimitKind::Equilibrium;
    out.limit_point = e;
    out.trajectory = std::move(traj);
  } else {
    // Oscillatory regime: settle when consecutive rising crossings of the
    // section y = k agree to tolerance.
    std::vector<EventSpec<3>> events(1);
    const double k = p.k;
    events[0].g = [k](const Vec3& s) { return s[1] - k; };
    events[0].direction = EventSpec<3>::Direction::Rising;
    events[0].terminal = false;
    auto [traj, hits] = integrate_with_events(p, s0, max_horizon, cfg, events);
    out.limit_kind = LimitKind::PeriodicOrbit;
    out.trajectory = std::move(traj);
    for (std::size_t i = 1; i < hits.size(); ++i) {
      if (norm(hits[i].state - hits[i - 1].state) < settle_tol) {
        out.settled = true;
        out.settle_time = hits[i].t;
        out.limit_point = hits[i].state;
        break;
      }
    }
    if (!out.settled && !hits.empty()) {
      out.settle_time = hits.back().t;
      out.limit_point = hits.back().state;
    }
  }

  const Vec3 e_or_zero = p.k > 0.0 ? interior_equilibrium(p) : Vec3{0.0, 0.0, 0.0};
  double min_dist = std::numeric_limits<double>::infinity();
  const double t_lo = out.settle_time / 2.0, t_hi = out.trajectory.t_end();
  const int n = 2000;
  for (int j = 0; j <= n; ++j) {
    const double t = t_lo + (t_hi - t_lo) * static_cast<double>(j) / n;
    min_dist = std::min(min_dist, norm(out.trajectory.at(t) - e_or_zero));
  }
  out.min_distance_to_E_tail = min_dist;
  return out;
}

/// One branch of the stable manifold of E, stored in forward-time order:
/// boundary endpoint first, E-end last.
struct ManifoldBranch {
  enum class Label { Upper, Lower };  // p_u (exits through y=0), p_l (z=0)
  Label label;
  std::vector<double> times;
  std::vector<Vec3> states;
  Vec3 boundary_endpoint;
  double worst_monotonicity_violation = 0.0;  // positive means a violation of that size
  double worst_box_violation = 0.0;
  bool endpoint_ok = false;
  double forward_terminal_distance_to_E = 0.0;

  bool valid(double slack = 1e-9) const {
    return endpoint_ok && worst_monotonicity_violation <= slack && worst_box_violation <= slack &&
           forward_terminal_distance_to_E < 1e-8;
  }
};

namespace detail {

inline ManifoldBranch audit_branch(const Params& p, ManifoldBranch br) {
  const double k = p.k;
  const bool upper = br.label == ManifoldBranch::Label::Upper;
  double mono = 0.0, box = 0.0;
  for (std::size_t i = 0; i < br.states.size(); ++i) {
    const Vec3& s = br.states[i];
    if (i > 0) {
      const Vec3& prev = br.states[i - 1];
      if (upper) {
        // x, y increasing; z decreasing along forward time.
        mono = std::max({mono, prev[0] - s[0], prev[1] - s[1], s[2] - prev[2]});
      } else {
        mono = std::max({mono, s[0] - prev[0], s[1] - prev[1], prev[2] - s[2]});
      }
    }
    if (upper)
      box = std::max({box, s[0] - k, s[1] - k, k - s[2], -s[0], -s[1]});
    else
      box = std::max({box, k - s[0], k - s[1], s[2] - k, -s[2]});
  }
  br.worst_monotonicity_violation = mono;
  br.worst_box_violation = box;
  const Vec3& b = br.boundary_endpoint;
  if (upper)
    br.endpoint_ok = std::fabs(b[1]) < 1e-9 && b[0] > 0.0 && b[0] < k && b[2] > k;
  else
    br.endpoint_ok = std::fabs(b[2]) < 1e-9 && b[0] > k && b[1] > k;
  return br;
}

}  // namespace detail

struct StableManifoldE {
  ManifoldBranch upper;  // p_u
  ManifoldBranch lower;  // p_l
};

/// Traces both branches of the one-dimensional stable manifold of E by
/// integrating the time-reversed field from E -+ delta * v, where v is the
/// stable eigenvector, until the trajectory exits through y = 0 (p_u) or
/// z = 0 (p_l). Requires the oscillatory regime k > k3 + k5.
inline StableManifoldE trace_stable_manifold_E(const Params& p, double delta,
                                               const IntegratorConfig& cfg = {},
                                               double max_horizon = 1000.0) {
  p.validate();
  if (!(p.k > p.k3 + p.k5)) throw std::domain_error("trace_stable_manifold_E: requires k > k3+k5");
  if (!(delta > 0.0 && delta <= 1e-6))
    throw std::invalid_argument("trace_stable_manifold_E: need 0 < delta <= 1e-6");

  const StableEigenpair pair = stable_eigenpair_at_E(p);
  const Vec3 e = interior_equilibrium(p);
  auto reversed = [&p](double, const Vec3& s) {
    const Vec3 f = vector_field(p, s);
    return Vec3{-f[0], -f[1], -f[2]};
  };

  auto trace_one = [&](ManifoldBranch::Label label) {
    const double sign = label == ManifoldBranch::Label::Upper ? -1.0 : 1.0;
    const Vec3 s0 = e + (sign * delta) * pair.eigenvector;
    const std::size_t stop_comp = label == ManifoldBranch::Label::Upper ? 1 : 2;

    std::vector<EventSpec<3>> events(1);
    events[0].g = [stop_comp](const Vec3& s) { return s[stop_comp]; };
    events[0].direction = EventSpec<3>::Direction::Falling;
    events[0].terminal = true;
    std::vector<EventHit<3>> hits;
    // The boundary face is only reached in the limit numerically; clamping is
    // disabled so the terminal crossing of 0 is observable.
    Solution<3> rev = integrate_ode<3>(reversed, s0, 0.0, max_horizon, cfg, 0, &events, &hits);
    if (rev.status != IntegrateStatus::TerminalEvent)
      throw std::runtime_error("trace_stable_manifold_E: branch did not reach the boundary face");

    ManifoldBranch br;
    br.label = label;
    const double t_total = rev.t_end();
    br.times.reserve(rev.times.size());
    br.states.reserve(rev.states.size());
    for (std::size_t i = rev.times.size(); i-- > 0;) {
      br.times.push_back(t_total - rev.times[i]);
      br.states.push_back(rev.states[i]);
    }
    br.boundary_endpoint = br.states.front();

    // Forward convergence to E from the E-end start point.
    std::vector<EventSpec<3>> conv(1);
    conv[0].g = [e](const Vec3& s) {
      const Vec3 d = s - e;
      return dot(d, d) - 1e-17;
    };
    conv[0].direction = EventSpec<3>::Direction::Falling;
    conv[0].terminal = true;
    auto [fwd, fh] = integrate_with_events(p, s0, 100.0, cfg, conv);
    br.forward_terminal_distance_to_E = norm(fwd.states.back() - e);

    return detail::audit_branch(p, br);
  };

  return {trace_one(ManifoldBranch::Label::Upper), trace_one(ManifoldBranch::Label::Lower)};
}

}  // namespace hopf

#endif  // HOPF_GLOBAL_HPP
