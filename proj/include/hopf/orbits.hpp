#ifndef HOPF_ORBITS_HPP
#define HOPF_ORBITS_HPP

// Periodic-orbit location in the oscillatory regime: Poincare return map on
// the section y = k (rising crossings), Newton refinement of the section
// fixed point using the variational monodromy, Floquet multipliers, and an
// orbit census over many seeds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hopf/global.hpp"
#include "hopf/integrate.hpp"
#include "hopf/model.hpp"
#include "hopf/spectral.hpp"

namespace hopf {

/// Section y = k with rising crossings (y' > 0, i.e. z > y). E lies on it and
/// every periodic orbit must cross it because the orbit average of y is k.
struct PoincareSection {
  double level;  // = k
  static constexpr double transversality_min = 1e-10;
};

inline PoincareSection section_for(const Params& p) { return {p.k}; }

struct ReturnMapResult {
  Vec3 point;      // next rising crossing
  double time;     // elapsed time to it
  Mat3 monodromy;  // fundamental matrix over the segment
};

/// One application of the return map from a point on the section. Fails (no
/// value) when no transversal rising crossing occurs within the horizon.
inline std::optional<ReturnMapResult> return_map(const Params& p, const Vec3& s_on_section,
                                                 const IntegratorConfig& cfg = {},
                                                 double horizon = 200.0) {
  p.validate();
  if (!(p.k > p.k3 + p.k5)) throw std::domain_error("return_map: requires k > k3 + k5");
  if (std::fabs(s_on_section[1] - p.k) > 1e-6 * std::max(1.0, p.k))
    throw std::invalid_argument("return_map: point is not on the section y = k");

  const double k = p.k;
  std::vector<EventSpec<3>> events(1);
  events[0].g = [k](const Vec3& s) { return s[1] - k; };
  events[0].direction = EventSpec<3>::Direction::Rising;
  events[0].terminal = true;
  std::vector<EventHit<3>> hits;
  const VariationalResult vr =
      integrate_variational_events(p, s_on_section, horizon, cfg, events, &hits);
  if (vr.status != IntegrateStatus::TerminalEvent || hits.empty()) return std::nullopt;
  const Vec3 next = vr.final_state;
  const double yprime = p.k3 * (next[2] - next[1]);
  if (std::fabs(yprime) < PoincareSection::transversality_min) return std::nullopt;
  return ReturnMapResult{next, vr.t_final, vr.fundamental_matrix};
}

struct PeriodicOrbit {
  Params params{0.0, 1.0, 1.0};
  Vec3 section_point{};  // y component equals k
  double period = 0.0;
  std::array<std::complex<double>, 3> multipliers{};
  Stability stability = Stability::Marginal;
  double closure_residual = 0.0;      // |phi(T, s*) - s*|
  double liouville_mismatch = 0.0;    // |prod(multipliers) - exp(int tr Df)|
  double min_component_on_orbit = 0.0;

  /// Index of the multiplier closest to 1 (the trivial one).
  std::size_t trivial_index() const {
    std::size_t best = 0;
    double d = std::abs(multipliers[0] - 1.0);
    for (std::size_t i = 1; i < 3; ++i)
      if (std::abs(multipliers[i] - 1.0) < d) {
        d = std::abs(multipliers[i] - 1.0);
        best = i;
      }
    return best;
  }

  double max_nontrivial_modulus() const {
    const std::size_t ti = trivial_index();
    double m = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      if (i != ti) m = std::max(m, std::abs(multipliers[i]));
    return m;
  }
};

/// Floquet multipliers of a closed orbit through `section_point` with the
/// given period, with the Liouville determinant cross-check.
inline std::array<std::complex<double>, 3> floquet_multipliers(const Params& p,
                                                               const Vec3& section_point,
                                                               double period,
                                                               const IntegratorConfig& cfg = {},
                                                               double* liouville_mismatch = nullptr) {
  const VariationalResult vr = integrate_variational(p, section_point, period, cfg);
  const Spectrum sp = eigenvalues(vr.fundamental_matrix);
  if (liouville_mismatch) {
    const double trace_integral = integral_along(
        vr.trajectory,
        [&p](double, const Vec3& s) { return (p.k - s[1]) - p.k3 - p.k5; }, 0.0, period);
    const std::complex<double> prod = sp.roots[0] * sp.roots[1] * sp.roots[2];
    *liouville_mismatch = std::abs(prod - std::exp(trace_integral));
  }
  return sp.roots;
}

namespace detail {

/// Differential of the return map restricted to section coordinates (x, z):
/// rows/columns 0 and 2 of (I - f e2^T / f_y) * Phi at the landing point.
inline std::array<std::array<double, 2>, 2> section_jacobian(const Params& p, const Vec3& landing,
                                                             const Mat3& monodromy) {
  const Vec3 f = vector_field(p, landing);
  Mat3 proj = Mat3::identity();
  for (std::size_t i = 0; i < 3; ++i) proj(i, 1) -= f[i] / f[1];
  const Mat3 dp = proj * monodromy;
  return {{{dp(0, 0), dp(0, 2)}, {dp(2, 0), dp(2, 2)}}};
}

}  // namespace detail

struct OrbitSearchConfig {
  int warmup_iterations = 200;
  int newton_iterations = 50;
  double newton_tol = 1e-11;      // on the section displacement norm
  double warmup_handoff = 1e-4;   // switch to Newton once iterates agree this well
  double return_horizon = 200.0;
};

/// Locates the periodic orbit through the section: return-map iteration from
/// the guess, then Newton on the 2D displacement map with the monodromy-based
/// Jacobian.
inline PeriodicOrbit find_periodic_orbit(const Params& p, const Vec3& guess,
                                         const IntegratorConfig& cfg = {},
                                         const OrbitSearchConfig& ocfg = {}) {
  p.validate();
  if (!(p.k > p.k3 + p.k5)) throw std::domain_error("find_periodic_orbit: requires k > k3 + k5");

  Vec3 s = guess;
  s[1] = p.k;
  // Warm-up: the orbit is attracting, so iteration supplies a basin-interior
  // Newton start.
  for (int it = 0; it < ocfg.warmup_iterations; ++it) {
    const auto r = return_map(p, s, cfg, ocfg.return_horizon);
    if (!r) throw std::runtime_error("find_periodic_orbit: return map failed during warm-up");
    const double moved = norm(r->point - s);
    s = r->point;
    s[1] = p.k;
    if (moved < ocfg.warmup_handoff) break;
  }

  // Errors in the section point are amplified along the orbit by the large
  // intra-period expansion of x, so the Newton stage runs at the search
  // tolerance first and is then polished at a tightened one.
  IntegratorConfig tight = cfg;
  tight.rel_tol = std::min(cfg.rel_tol, 1e-12);
  tight.abs_tol = std::min(cfg.abs_tol, 1e-14);

  double period = 0.0;
  Mat3 monodromy;
  bool coarse_done = false;  // converged at the search tolerance
  bool converged = false;    // converged again at the tightened tolerance
  for (int it = 0; it < ocfg.newton_iterations + 8; ++it) {
    const auto r = return_map(p, s, coarse_done ? tight : cfg, ocfg.return_horizon);
    if (!r) throw std::runtime_error("find_periodic_orbit: return map failed during Newton");
    period = r->time;
    monodromy = r->monodromy;
    const double dx = r->point[0] - s[0];
    const double dz = r->point[2] - s[2];
    const double disp = std::hypot(dx, dz);
    if (disp < ocfg.newton_tol) {
      if (coarse_done) {
        converged = true;
        break;
      }
      coarse_done = true;
      continue;
    }
    auto dp = detail::section_jacobian(p, r->point, monodromy);
    // Solve (DP - I) delta = -(P(s) - s).
    const double a = dp[0][0] - 1.0, b = dp[0][1];
    const double c = dp[1][0], d = dp[1][1] - 1.0;
    const double det = a * d - b * c;
    if (std::fabs(det) < 1e-12)
      throw std::runtime_error("find_periodic_orbit: singular section Jacobian");
    const double ddx = (-dx * d + dz * b) / det;
    const double ddz = (dx * c - dz * a) / det;
    s[0] += ddx;
    s[2] += ddz;
    if (!(s[0] > 0.0 && s[2] > 0.0))
      throw std::runtime_error("find_periodic_orbit: Newton left the interior");
  }
  if (!converged) throw std::runtime_error("find_periodic_orbit: Newton did not converge");

  PeriodicOrbit orbit;
  orbit.params = p;
  orbit.section_point = s;
  orbit.period = period;
  double liou = 0.0;
  orbit.multipliers = floquet_multipliers(p, s, period, tight, &liou);
  orbit.liouville_mismatch = liou;

  // Closure is checked with the tightened tolerance so the measurement is not
  // dominated by the search integrator's own error.
  const Trajectory one_period = integrate(p, s, period, tight);
  orbit.closure_residual = norm(one_period.states.back() - s);
  double minc = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 2000; ++j)
    minc = std::min(minc, min_component(one_period.at(period * j / 2000.0)));
  orbit.min_component_on_orbit = minc;

  const double mnt = orbit.max_nontrivial_modulus();
  if (mnt < 1.0 - 1e-6)
    orbit.stability = Stability::Stable;
  else if (mnt > 1.0 + 1e-6)
    orbit.stability = Stability::Unstable;
  else
    orbit.stability = Stability::Marginal;
  return orbit;
}

/// Default initial guess: a point of the unstable manifold of the origin
/// after its transient, which lies in the basin of an attracting orbit.
inline Vec3 default_orbit_guess(const Params& p, const IntegratorConfig& cfg = {}) {
  const auto trace = trace_unstable_manifold_origin(p, 1e-7, cfg);
  if (trace.limit_kind != LimitKind::PeriodicOrbit || !trace.settled)
    throw std::runtime_error("default_orbit_guess: unstable manifold did not settle on an orbit");
  return trace.limit_point;
}

struct CensusEntry {
  PeriodicOrbit orbit;
  int hits = 1;  // how many seeds converged to it
};

/// Runs the orbit search from low-discrepancy interior seeds and clusters the
/// results. A census of one is evidence, not proof, of uniqueness.
inline std::vector<CensusEntry> orbit_census(const Params& p, int n_starts,
                                             const IntegratorConfig& cfg = {},
                                             const OrbitSearchConfig& ocfg = {},
                                             double cluster_tol = 1e-6,
                                             std::vector<std::string>* failures = nullptr) {
  p.validate();
  if (!(p.k > p.k3 + p.k5)) throw std::domain_error("orbit_census: requires k > k3 + k5");
  const double M = attractor_bound(p);
  const double lo = 1e-2 * p.k;

  std::vector<CensusEntry> found;
  for (int i = 0; i < n_starts; ++i) {
    // Halton pair (bases 2 and 3) spread over the section rectangle.
    auto halton = [](int idx, int base) {
      double f = 1.0, r = 0.0;
      for (int n = idx + 1; n > 0; n /= base) {
        f /= base;
        r += f * (n % base);
      }
      return r;
    };
    Vec3 seed{lo + (M - lo) * halton(i, 2), p.k, lo + (M - lo) * halton(i, 3)};
    try {
      // Project the seed onto the section by flowing to the next crossing.
      const auto r0 = return_map(p, seed, cfg, ocfg.return_horizon);
      if (!r0) throw std::runtime_error("seed never returned to the section");
      PeriodicOrbit orb = find_periodic_orbit(p, r0->point, cfg, ocfg);
      bool merged = false;
      for (auto& entry : found) {
        if (norm(entry.orbit.section_point - orb.section_point) < cluster_tol &&
            std::fabs(entry.orbit.period - orb.period) < cluster_tol) {
          entry.hits++;
          merged = true;
          break;
        }
      }
      if (!merged) found.push_back({std::move(orb), 1});
    } catch (const std::exception& ex) {
      if (failures) failures->push_back(ex.what());
    }
  }
  return found;
}

}  // namespace hopf

#endif  // HOPF_ORBITS_HPP
