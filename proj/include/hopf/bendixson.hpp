#ifndef HOPF_BENDIXSON_HPP
#define HOPF_BENDIXSON_HPP

// The compound-matrix certificate that rules out periodic orbits for
// 0 < k < k3 + k5: the weighted compound B(p), its Lozinskii measure under
// the max norm, and the time-averaged negativity estimate q2_bar.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopf/global.hpp"
#include "hopf/integrate.hpp"
#include "hopf/model.hpp"

namespace hopf {

/// Weighted compound B = A_f A^-1 + A Df^[2] A^-1 for the diagonal weight
/// A = diag((1-2e)/x, (1-e)/x, -1/k5). Depends on the state only through x.
inline Mat3 B_matrix(const Params& p, const Vec3& s, double epsilon) {
  p.validate();
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("B_matrix: epsilon must lie in (0, 1/2)");
  if (!(s[0] > 0.0)) throw std::domain_error("B_matrix: requires x > 0");
  Mat3 b;
  b(0, 0) = -p.k3;
  b(0, 1) = p.k3 * (1.0 - 2.0 * epsilon) / (1.0 - epsilon);
  b(0, 2) = 0.0;
  b(1, 0) = 0.0;
  b(1, 1) = -p.k5;
  b(1, 2) = p.k5 * (1.0 - epsilon);
  b(2, 0) = s[0] / (1.0 - 2.0 * epsilon);
  b(2, 1) = 0.0;
  b(2, 2) = -(p.k3 + p.k5);
  return b;
}

/// B recomputed from its defining formula rather than the closed form; used
/// as an independent cross-check.
inline Mat3 B_matrix_from_definition(const Params& p, const Vec3& s, double epsilon) {
  if (!(s[0] > 0.0)) throw std::domain_error("B_matrix_from_definition: requires x > 0");
  const Mat3 a = Mat3::diagonal((1.0 - 2.0 * epsilon) / s[0], (1.0 - epsilon) / s[0], -1.0 / p.k5);
  const Mat3 a_inv = inverse(a);
  // Directional derivative of A along the flow: only the x-dependent entries
  // move, d/dt (c/x) = -c x'/x^2 with x' = x(k - y).
  const double xdot = vector_field(p, s)[0];
  const Mat3 a_f = Mat3::diagonal(-(1.0 - 2.0 * epsilon) * xdot / (s[0] * s[0]),
                                  -(1.0 - epsilon) * xdot / (s[0] * s[0]), 0.0);
  return a_f * a_inv + a * second_additive_compound(p, s) * a_inv;
}

/// Lozinskii (logarithmic) measure under the max norm: the largest row sum of
/// the diagonal entry plus absolute off-diagonal entries.
inline double lozinskii_max_norm(const Mat3& m) {
  if (!m.finite()) throw std::invalid_argument("lozinskii_max_norm: nonfinite entries");
  double mu = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) {
    double row = m(i, i);
    for (std::size_t j = 0; j < 3; ++j)
      if (j != i) row += std::fabs(m(i, j));
    mu = std::max(mu, row);
  }
  return mu;
}

/// Closed form of mu(B) for this system.
inline double mu_B_closed_form(const Params& p, double x, double epsilon) {
  return std::max({-epsilon * p.k3 / (1.0 - epsilon), -epsilon * p.k5,
                   x / (1.0 - 2.0 * epsilon) - (p.k3 + p.k5)});
}

/// A valid epsilon with k/(1-2e) < k3+k5: the midpoint heuristic
/// min(1/4, (1 - k/(k3+k5))/4), clipped into (1e-6, 1/2 - 1e-6).
inline double auto_epsilon(const Params& p) {
  p.validate();
  if (!(p.k > 0.0 && p.k < p.k3 + p.k5))
    throw std::domain_error("auto_epsilon: requires 0 < k < k3 + k5");
  const double eps = std::min(0.25, (1.0 - p.k / (p.k3 + p.k5)) / 2.0 * 0.5);
  return std::clamp(eps, 1e-6, 0.5 - 1e-6);
}

struct CertificateConfig {
  double epsilon = 0.0;  // 0 means choose via auto_epsilon
  double horizon = 2000.0;
  int grid_per_axis = 4;      // start grid over the absorbing box [eta, M]^3
  double eta = 0.0;           // 0 means a conservative default of 1e-2 * k
  double margin_floor = 1e-3;

  void validate() const {
    if (!(horizon > 0.0 && grid_per_axis >= 1))
      throw std::invalid_argument("CertificateConfig: bad horizon or grid");
    if (epsilon != 0.0 && !(epsilon > 0.0 && epsilon < 0.5))
      throw std::invalid_argument("CertificateConfig: epsilon must lie in (0, 1/2)");
  }
};

struct Certificate {
  bool applicable = false;  // regime and epsilon preconditions hold
  bool pass = false;        // q2_bar < -margin_floor
  double epsilon = 0.0;
  double horizon = 0.0;
  int n_starts = 0;
  double q2_bar = 0.0;             // sup over starts of the tail-window average of mu(B)
  double worst_full_average = 0.0; // sup over starts of the [0, T] average
  double margin = 0.0;             // -q2_bar
  std::string detail;
};

/// Finite-horizon estimate of q2_bar = limsup_T sup_p (1/T) int_0^T mu(B) ds
/// over the absorbing box. Negative with margin certifies the absence of
/// nontrivial periodic orbits.
inline Certificate q2_bar(const Params& p, const CertificateConfig& ccfg = {},
                          const IntegratorConfig& icfg = {}) {
  p.validate();
  ccfg.validate();
  Certificate cert;
  cert.horizon = ccfg.horizon;

  if (!(p.k > 0.0 && p.k < p.k3 + p.k5)) {
    cert.detail = "not applicable: requires 0 < k < k3 + k5";
    return cert;
  }
  const double epsilon = ccfg.epsilon != 0.0 ? ccfg.epsilon : auto_epsilon(p);
  if (!(p.k / (1.0 - 2.0 * epsilon) < p.k3 + p.k5)) {
    cert.detail = "not applicable: epsilon violates k/(1-2*epsilon) < k3 + k5";
    return cert;
  }
  cert.applicable = true;
  cert.epsilon = epsilon;

  const double M = attractor_bound(p);
  const double eta = ccfg.eta > 0.0 ? ccfg.eta : 1e-2 * p.k;
  const auto starts = interior_grid(eta, M, ccfg.grid_per_axis);
  cert.n_starts = static_cast<int>(starts.size());

  const double T = ccfg.horizon;
  double sup_tail = -std::numeric_limits<double>::infinity();
  double sup_full = sup_tail;
  for (const Vec3& s0 : starts) {
    const Trajectory traj = integrate(p, s0, T, icfg);
    auto mu = [&](double, const Vec3& s) { return mu_B_closed_form(p, s[0], epsilon); };
    const double full = integral_along(traj, mu, 0.0, T) / T;
    const double tail = integral_along(traj, mu, T / 2.0, T) / (T / 2.0);
    sup_full = std::max(sup_full, full);
    sup_tail = std::max(sup_tail, tail);
  }
  cert.q2_bar = sup_tail;
  cert.worst_full_average = sup_full;
  cert.margin = -sup_tail;
  cert.pass = sup_tail < -ccfg.margin_floor;
  return cert;
}

}  // namespace hopf

#endif  // HOPF_BENDIXSON_HPP
