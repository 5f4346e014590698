#ifndef HOPF_MODEL_HPP
#define HOPF_MODEL_HPP

// The scaled three-species reaction system
//   x' = k x - x y
//   y' = k3 (z - y)
//   z' = k5 (x - z)
// on the nonnegative octant, together with its Jacobian, second additive
// compound, equilibria and regime classification.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopf/mat3.hpp"

namespace hopf {

/// Rate constants of the unscaled reaction system
///   x' = k x - k2 x y,  y' = k5 z - k3 y,  z' = k4 x - k5 z,
/// with k = k1*A - k4 and A the outer-reactant concentration.
struct OriginalParams {
  double k1, k2, k3, k4, k5;
  double A;

  void validate() const {
    if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0 && k4 > 0.0 && k5 > 0.0))
      throw std::invalid_argument("OriginalParams: all rate constants must be positive");
    if (!(A >= 0.0)) throw std::invalid_argument("OriginalParams: A must be nonnegative");
  }
};

/// Parameters of the scaled system. k may have any sign; k3, k5 > 0.
struct Params {
  double k;
  double k3;
  double k5;

  void validate() const {
    if (!(k3 > 0.0 && k5 > 0.0)) throw std::invalid_argument("Params: k3 and k5 must be positive");
    if (!std::isfinite(k)) throw std::invalid_argument("Params: k must be finite");
  }
};

/// Coordinate scaling x = a*x_bar, y = b*y_bar, z = c*z_bar.
struct ScaleFactors {
  double a, b, c;
};

/// Reduces the unscaled system to the scaled one. The scale factors are the
/// unique solution of k2*b = 1, k5*c = k3*b, k4*a = k5*c.
inline std::pair<Params, ScaleFactors> scale_from_original(const OriginalParams& op) {
  op.validate();
  ScaleFactors s;
  s.b = 1.0 / op.k2;
  s.c = op.k3 * s.b / op.k5;
  s.a = op.k5 * s.c / op.k4;
  return {Params{op.k1 * op.A - op.k4, op.k3, op.k5}, s};
}

/// A point in concentration space. Construction through `checked` enforces
/// nonnegativity; the vector-field operations accept any finite coordinates.
struct State {
  Vec3 v{};

  static State checked(double x, double y, double z) {
    if (!(x >= 0.0 && y >= 0.0 && z >= 0.0))
      throw std::invalid_argument("State: concentrations must be nonnegative");
    return State{{x, y, z}};
  }

  double x() const { return v[0]; }
  double y() const { return v[1]; }
  double z() const { return v[2]; }
};

inline Vec3 vector_field(const Params& p, const Vec3& s) {
  return {p.k * s[0] - s[0] * s[1], p.k3 * (s[2] - s[1]), p.k5 * (s[0] - s[2])};
}

inline Vec3 vector_field_original(const OriginalParams& op, const Vec3& s) {
  const double k = op.k1 * op.A - op.k4;
  return {k * s[0] - op.k2 * s[0] * s[1], op.k5 * s[2] - op.k3 * s[1], op.k4 * s[0] - op.k5 * s[2]};
}

inline Mat3 jacobian(const Params& p, const Vec3& s) {
  Mat3 m;
  m(0, 0) = p.k - s[1];
  m(0, 1) = -s[0];
  m(0, 2) = 0.0;
  m(1, 0) = 0.0;
  m(1, 1) = -p.k3;
  m(1, 2) = p.k3;
  m(2, 0) = p.k5;
  m(2, 1) = 0.0;
  m(2, 2) = -p.k5;
  return m;
}

/// Second additive compound of the Jacobian; its spectrum consists of the
/// pairwise sums of the Jacobian eigenvalues.
inline Mat3 second_additive_compound(const Params& p, const Vec3& s) {
  Mat3 m;
  m(0, 0) = p.k - s[1] - p.k3;
  m(0, 1) = p.k3;
  m(0, 2) = 0.0;
  m(1, 0) = 0.0;
  m(1, 1) = p.k - s[1] - p.k5;
  m(1, 2) = -s[0];
  m(2, 0) = -p.k5;
  m(2, 1) = 0.0;
  m(2, 2) = -(p.k3 + p.k5);
  return m;
}

/// Origin always; the interior equilibrium E = k(1,1,1) only for k > 0.
inline std::vector<Vec3> equilibria(const Params& p) {
  std::vector<Vec3> eq{{0.0, 0.0, 0.0}};
  if (p.k > 0.0) eq.push_back({p.k, p.k, p.k});
  return eq;
}

inline Vec3 interior_equilibrium(const Params& p) {
  if (!(p.k > 0.0)) throw std::domain_error("interior equilibrium exists only for k > 0");
  return {p.k, p.k, p.k};
}

enum class Regime {
  GlobalDecay,     // k <= 0: every solution converges to 0
  StableInterior,  // 0 < k < k3+k5: interior solutions converge to E
  Oscillatory,     // k > k3+k5: periodic orbits
  HopfBoundary,    // k = k3+k5 within tolerance
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::GlobalDecay: return "global_decay";
    case Regime::StableInterior: return "stable_interior";
    case Regime::Oscillatory: return "oscillatory";
    case Regime::HopfBoundary: return "hopf_boundary";
  }
  return "?";
}

inline double default_hopf_tolerance(const Params& p) { return 1e-9 * (p.k3 + p.k5); }

inline Regime classify_regime(const Params& p, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("classify_regime: tol must be nonnegative");
  const double kh = p.k3 + p.k5;
  if (std::fabs(p.k - kh) <= tol) return Regime::HopfBoundary;
  if (p.k <= 0.0) return Regime::GlobalDecay;
  if (p.k < kh) return Regime::StableInterior;
  return Regime::Oscillatory;
}

inline Regime classify_regime(const Params& p) { return classify_regime(p, default_hopf_tolerance(p)); }

}  // namespace hopf

#endif  // HOPF_MODEL_HPP
