#ifndef HOPF_INTEGRATE_HPP
#define HOPF_INTEGRATE_HPP

// Adaptive Dormand-Prince 5(4) integration with a quartic dense-output
// interpolant, event localization on the dense output, variational
// (fundamental-matrix) integration, and quadrature helpers.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "hopf/mat3.hpp"
#include "hopf/model.hpp"

namespace hopf {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  long max_steps = 20'000'000;

  void validate() const {
    if (!(rel_tol > 0.0 && abs_tol > 0.0 && max_step > 0.0 && max_steps > 0))
      throw std::invalid_argument("IntegratorConfig: tolerances and step limits must be positive");
  }
};

enum class IntegrateStatus { Ok, TerminalEvent, MaxStepsExceeded, StepUnderflow };

inline const char* to_string(IntegrateStatus s) {
  switch (s) {
    case IntegrateStatus::Ok: return "ok";
    case IntegrateStatus::TerminalEvent: return "terminal_event";
    case IntegrateStatus::MaxStepsExceeded: return "max_steps_exceeded";
    case IntegrateStatus::StepUnderflow: return "step_underflow";
  }
  return "?";
}

template <std::size_t N>
using VecN = std::array<double, N>;

template <std::size_t N>
struct EventSpec {
  enum class Direction { Rising, Falling, Both };
  std::function<double(const VecN<N>&)> g;
  Direction direction = Direction::Both;
  bool terminal = false;
};

template <std::size_t N>
struct EventHit {
  double t;
  VecN<N> state;
  std::size_t event_index;
};

/// Continuous extension of one accepted step (Hairer's contd5 form).
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<VecN<N>, 5> r{};

  VecN<N> eval(double t) const {
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    VecN<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
    return y;
  }
};

template <std::size_t N>
struct Solution {
  std::vector<double> times;
  std::vector<VecN<N>> states;
  std::vector<DenseSegment<N>> segments;
  IntegrateStatus status = IntegrateStatus::Ok;
  long steps_accepted = 0;
  long steps_rejected = 0;
  long clamp_count = 0;        // negative components clamped to 0
  double min_pre_clamp = 0.0;  // most negative component seen before clamping

  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }

  VecN<N> at(double t) const {
    if (times.empty()) throw std::logic_error("Solution::at on empty solution");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    std::size_t lo = 0, hi = times.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (times[mid] <= t)
        lo = mid;
      else
        hi = mid;
    }
    if (t == times[lo]) return states[lo];
    return segments[lo].eval(t);
  }
};

using Trajectory = Solution<3>;

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double A21 = 1.0 / 5.0;
inline constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
inline constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
inline constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                        A54 = -212.0 / 729.0;
inline constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                        A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
inline constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                        B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
inline constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                        E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;
// Dense-output constants.
inline constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                        D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                        D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

template <std::size_t N, class RHS>
double initial_step(RHS& f, double t0, const VecN<N>& y0, const VecN<N>& f0,
                    const IntegratorConfig& cfg, double span) {
  auto sc_norm = [&](const VecN<N>& v, const VecN<N>& ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = cfg.abs_tol + cfg.rel_tol * std::fabs(ref[i]);
      s += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(s / static_cast<double>(N));
  };
  const double d0 = sc_norm(y0, y0);
  const double d1 = sc_norm(f0, y0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  VecN<N> y1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
  const VecN<N> f1 = f(t0 + h0, y1);
  VecN<N> diff;
  for (std::size_t i = 0; i < N; ++i) diff[i] = f1[i] - f0[i];
  const double d2 = sc_norm(diff, y0) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, cfg.max_step, span});
}

template <std::size_t N>
void locate_events(const DenseSegment<N>& seg, const std::vector<EventSpec<N>>& events,
                   std::vector<EventHit<N>>& hits, bool& terminal, double& t_terminal) {
  constexpr int kScan = 8;
  const double ta = seg.t0, tb = seg.t0 + seg.h;
  for (std::size_t ei = 0; ei < events.size(); ++ei) {
    const auto& ev = events[ei];
    double tp = ta;
    double gp = ev.g(seg.eval(tp));
    for (int s = 1; s <= kScan; ++s) {
      const double tc = ta + (tb - ta) * s / kScan;
      const double gc = ev.g(seg.eval(tc));
      const bool rising = gp < 0.0 && gc >= 0.0;
      const bool falling = gp > 0.0 && gc <= 0.0;
      const bool match = (ev.direction == EventSpec<N>::Direction::Both && (rising || falling)) ||
                         (ev.direction == EventSpec<N>::Direction::Rising && rising) ||
                         (ev.direction == EventSpec<N>::Direction::Falling && falling);
      if (match) {
        double lo = tp, hi = tc, glo = gp;
        for (int it = 0; it < 90 && hi - lo > 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double gm = ev.g(seg.eval(mid));
          if ((glo < 0.0) == (gm < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const double tstar = 0.5 * (lo + hi);
        // Drop duplicate detections at segment joints.
        if (!hits.empty() && hits.back().event_index == ei &&
            std::fabs(hits.back().t - tstar) < 1e-10 * std::max(1.0, std::fabs(tstar)))
          continue;
        hits.push_back({tstar, seg.eval(tstar), ei});
        if (ev.terminal) {
          terminal = true;
          t_terminal = tstar;
          return;
        }
      }
      tp = tc;
      gp = gc;
    }
  }
}

}  // namespace detail

/// Core adaptive integrator. `clamp_dims` leading components are clamped to
/// zero when roundoff drives them slightly negative (concentrations).
template <std::size_t N, class RHS>
Solution<N> integrate_ode(RHS f, VecN<N> y0, double t0, double t_end, const IntegratorConfig& cfg,
                          std::size_t clamp_dims = 0,
                          const std::vector<EventSpec<N>>* events = nullptr,
                          std::vector<EventHit<N>>* hits = nullptr) {
  using namespace detail;
  cfg.validate();
  if (!(t_end > t0)) throw std::invalid_argument("integrate_ode: t_end must exceed t0");
  for (double v : y0)
    if (!std::isfinite(v)) throw std::invalid_argument("integrate_ode: nonfinite initial state");

  Solution<N> sol;
  sol.times.push_back(t0);
  sol.states.push_back(y0);

  double t = t0;
  VecN<N> y = y0;
  VecN<N> k1 = f(t, y);
  double h = initial_step<N>(f, t0, y0, k1, cfg, t_end - t0);

  VecN<N> k2, k3s, k4, k5s, k6, k7, ytmp, ynew;

  while (t < t_end) {
    if (sol.steps_accepted + sol.steps_rejected >= cfg.max_steps) {
      sol.status = IntegrateStatus::MaxStepsExceeded;
      return sol;
    }
    h = std::min({h, cfg.max_step, t_end - t});
    if (h < 1e-14 * std::max(1.0, std::fabs(t))) {
      sol.status = IntegrateStatus::StepUnderflow;
      return sol;
    }

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * A21 * k1[i];
    k2 = f(t + h / 5.0, ytmp);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    k3s = f(t + 3.0 * h / 10.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3s[i]);
    k4 = f(t + 4.0 * h / 5.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3s[i] + A54 * k4[i]);
    k5s = f(t + 8.0 * h / 9.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3s[i] + A64 * k4[i] + A65 * k5s[i]);
    k6 = f(t + h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3s[i] + B4 * k4[i] + B5 * k5s[i] + B6 * k6[i]);
    k7 = f(t + h, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (E1 * k1[i] + E3 * k3s[i] + E4 * k4[i] + E5 * k5s[i] + E6 * k6[i] +
                             E7 * k7[i]);
      const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (err > 1.0) {
      sol.steps_rejected++;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    // Accepted: build the dense segment before any clamping.
    DenseSegment<N> seg;
    seg.t0 = t;
    seg.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      seg.r[0][i] = y[i];
      seg.r[1][i] = ydiff;
      seg.r[2][i] = bspl;
      seg.r[3][i] = ydiff - h * k7[i] - bspl;
      seg.r[4][i] = h * (D1 * k1[i] + D3 * k3s[i] + D4 * k4[i] + D5 * k5s[i] + D6 * k6[i] +
                         D7 * k7[i]);
    }

    bool terminal = false;
    double t_terminal = 0.0;
    if (events && !events->empty() && hits)
      locate_events<N>(seg, *events, *hits, terminal, t_terminal);

    sol.segments.push_back(seg);
    sol.steps_accepted++;

    if (terminal) {
      sol.times.push_back(t_terminal);
      sol.states.push_back(seg.eval(t_terminal));
      sol.status = IntegrateStatus::TerminalEvent;
      return sol;
    }

    t += h;
    y = ynew;
    for (std::size_t i = 0; i < clamp_dims; ++i)
      if (y[i] < 0.0) {
        sol.min_pre_clamp = std::min(sol.min_pre_clamp, y[i]);
        y[i] = 0.0;
        sol.clamp_count++;
      }
    sol.times.push_back(t);
    sol.states.push_back(y);
    k1 = k7;  // FSAL

    const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, fac));
  }
  return sol;
}

inline Trajectory integrate(const Params& p, const Vec3& s0, double t_end,
                            const IntegratorConfig& cfg = {}) {
  return integrate_ode<3>([&p](double, const Vec3& s) { return vector_field(p, s); }, s0, 0.0,
                          t_end, cfg, 3);
}

inline std::pair<Trajectory, std::vector<EventHit<3>>> integrate_with_events(
    const Params& p, const Vec3& s0, double t_end, const IntegratorConfig& cfg,
    const std::vector<EventSpec<3>>& events) {
  std::vector<EventHit<3>> hits;
  Trajectory traj = integrate_ode<3>([&p](double, const Vec3& s) { return vector_field(p, s); },
                                     s0, 0.0, t_end, cfg, 3, &events, &hits);
  return {std::move(traj), std::move(hits)};
}

namespace detail {

/// State + fundamental matrix as a 12-vector: (x, y, z, Phi row-major).
inline VecN<12> variational_rhs(const Params& p, const VecN<12>& u) {
  const Vec3 s{u[0], u[1], u[2]};
  const Vec3 ds = vector_field(p, s);
  const Mat3 j = jacobian(p, s);
  VecN<12> du;
  du[0] = ds[0];
  du[1] = ds[1];
  du[2] = ds[2];
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t jj = 0; jj < 3; ++jj)
      du[3 + 3 * i + jj] =
          j(i, 0) * u[3 + jj] + j(i, 1) * u[6 + jj] + j(i, 2) * u[9 + jj];
  return du;
}

inline VecN<12> pack_variational(const Vec3& s) {
  VecN<12> u{};
  u[0] = s[0];
  u[1] = s[1];
  u[2] = s[2];
  u[3] = u[7] = u[11] = 1.0;
  return u;
}

inline Trajectory project_state(const Solution<12>& full) {
  Trajectory t;
  t.times = full.times;
  t.status = full.status;
  t.steps_accepted = full.steps_accepted;
  t.steps_rejected = full.steps_rejected;
  t.clamp_count = full.clamp_count;
  t.min_pre_clamp = full.min_pre_clamp;
  t.states.reserve(full.states.size());
  for (const auto& u : full.states) t.states.push_back({u[0], u[1], u[2]});
  t.segments.reserve(full.segments.size());
  for (const auto& s : full.segments) {
    DenseSegment<3> seg;
    seg.t0 = s.t0;
    seg.h = s.h;
    for (int c = 0; c < 5; ++c) seg.r[c] = {s.r[c][0], s.r[c][1], s.r[c][2]};
    t.segments.push_back(seg);
  }
  return t;
}

inline Mat3 unpack_matrix(const VecN<12>& u) {
  Mat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.e[i] = u[3 + i];
  return m;
}

}  // namespace detail

struct VariationalResult {
  Trajectory trajectory;    // state part, with dense output
  Mat3 fundamental_matrix;  // Phi(t_final), Phi(0) = I
  Vec3 final_state;
  double t_final;
  IntegrateStatus status;
};

inline VariationalResult integrate_variational(const Params& p, const Vec3& s0, double t_end,
                                               const IntegratorConfig& cfg = {}) {
  auto full = integrate_ode<12>(
      [&p](double, const VecN<12>& u) { return detail::variational_rhs(p, u); },
      detail::pack_variational(s0), 0.0, t_end, cfg, 3);
  const auto& uf = full.states.back();
  return {detail::project_state(full), detail::unpack_matrix(uf), {uf[0], uf[1], uf[2]},
          full.times.back(), full.status};
}

/// Variational integration stopping at events defined on the state part.
inline VariationalResult integrate_variational_events(const Params& p, const Vec3& s0,
                                                      double t_end, const IntegratorConfig& cfg,
                                                      const std::vector<EventSpec<3>>& events3,
                                                      std::vector<EventHit<3>>* hits3 = nullptr) {
  std::vector<EventSpec<12>> events;
  events.reserve(events3.size());
  for (const auto& e : events3) {
    EventSpec<12> lifted;
    lifted.g = [g = e.g](const VecN<12>& u) { return g(Vec3{u[0], u[1], u[2]}); };
    lifted.direction = static_cast<EventSpec<12>::Direction>(e.direction);
    lifted.terminal = e.terminal;
    events.push_back(std::move(lifted));
  }
  std::vector<EventHit<12>> hits;
  auto full = integrate_ode<12>(
      [&p](double, const VecN<12>& u) { return detail::variational_rhs(p, u); },
      detail::pack_variational(s0), 0.0, t_end, cfg, 3, &events, &hits);
  if (hits3) {
    hits3->clear();
    for (const auto& h : hits) hits3->push_back({h.t, Vec3{h.state[0], h.state[1], h.state[2]}, h.event_index});
  }
  const auto& uf = full.states.back();
  return {detail::project_state(full), detail::unpack_matrix(uf), {uf[0], uf[1], uf[2]},
          full.times.back(), full.status};
}

/// Adaptive trapezoidal quadrature of fn(t, state(t)) along the trajectory.
template <class Fn>
double integral_along(const Trajectory& traj, Fn fn, double t0, double t1,
                      double rel_tol = 1e-8) {
  if (!(t1 > t0) || t0 < traj.t_begin() - 1e-12 || t1 > traj.t_end() + 1e-12)
    throw std::invalid_argument("integral_along: window outside trajectory range");
  std::size_t n = 512;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  for (int refine = 0; refine < 14; ++refine, n *= 2) {
    const double dt = (t1 - t0) / static_cast<double>(n);
    double acc = 0.5 * (fn(t0, traj.at(t0)) + fn(t1, traj.at(t1)));
    for (std::size_t i = 1; i < n; ++i) {
      const double t = t0 + dt * static_cast<double>(i);
      acc += fn(t, traj.at(t));
    }
    value = acc * dt;
    if (refine > 0 && std::fabs(value - prev) <= rel_tol * std::max(1.0, std::fabs(value))) break;
    prev = value;
  }
  return value;
}

/// Time averages of (x, y, z) over [t0, t1] computed by augmenting the ODE
/// with integral states, so the quadrature error is at integrator tolerance.
/// Used where window averages must be sharper than dense-output quadrature,
/// e.g. over one exact orbit period.
inline Vec3 flow_time_averages(const Params& p, const Vec3& s0, double t0, double t1,
                               const IntegratorConfig& cfg = {}) {
  if (!(t1 > t0 && t0 >= 0.0)) throw std::invalid_argument("flow_time_averages: bad window");
  auto rhs = [&p](double, const VecN<6>& u) {
    const Vec3 s{u[0], u[1], u[2]};
    const Vec3 f = vector_field(p, s);
    return VecN<6>{f[0], f[1], f[2], s[0], s[1], s[2]};
  };
  Vec3 at_t0 = s0;
  if (t0 > 0.0) at_t0 = integrate(p, s0, t0, cfg).states.back();
  const auto sol = integrate_ode<6>(rhs, {at_t0[0], at_t0[1], at_t0[2], 0.0, 0.0, 0.0}, t0, t1,
                                    cfg, 3);
  const auto& u = sol.states.back();
  const double w = t1 - t0;
  return {u[3] / w, u[4] / w, u[5] / w};
}

inline double time_average(const Trajectory& traj, std::size_t component, double t0, double t1) {
  if (component > 2) throw std::invalid_argument("time_average: component index out of range");
  return integral_along(traj, [component](double, const Vec3& s) { return s[component]; }, t0,
                        t1) /
         (t1 - t0);
}

/// CSV export: header `t,x,y,z`, 17 significant digits, LF line endings.
inline void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,x,y,z\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", traj.times[i],
                  traj.states[i][0], traj.states[i][1], traj.states[i][2]);
    os << buf;
  }
}

}  // namespace hopf

#endif  // HOPF_INTEGRATE_HPP
