#ifndef HOPF_SPECTRAL_HPP
#define HOPF_SPECTRAL_HPP

// Closed-form 3x3 eigenanalysis via the characteristic cubic, equilibrium
// stability classification (eigenvalues cross-checked against Routh-Hurwitz),
// the Hopf locus k = k3 + k5 with frequency sqrt(k3*k5), and the stable
// eigenvector of E in the oscillatory regime.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hopf/mat3.hpp"
#include "hopf/model.hpp"

namespace hopf {

/// Coefficients of the monic cubic lambda^3 + c2 lambda^2 + c1 lambda + c0.
struct CubicCoeffs {
  double c2, c1, c0;

  std::complex<double> eval(std::complex<double> l) const { return ((l + c2) * l + c1) * l + c0; }
  std::complex<double> deriv(std::complex<double> l) const { return (3.0 * l + 2.0 * c2) * l + c1; }
};

enum class SpectrumTag { AllNegativeRealParts, HasPositiveRealPart, Marginal };

struct Spectrum {
  std::array<std::complex<double>, 3> roots;
  SpectrumTag tag;

  double max_real_part() const {
    return std::max({roots[0].real(), roots[1].real(), roots[2].real()});
  }
  double spectral_radius() const {
    return std::max({std::abs(roots[0]), std::abs(roots[1]), std::abs(roots[2])});
  }
};

inline CubicCoeffs char_poly(const Mat3& m) {
  return CubicCoeffs{-m.trace(), m.minor_sum(), -m.det()};
}

namespace detail {

inline std::complex<double> newton_polish(const CubicCoeffs& c, std::complex<double> r) {
  // Near a multiple root both f and f' are cancellation noise, so a raw
  // Newton step can be arbitrarily wrong; accept a step only if it reduces
  // the residual.
  double best = std::abs(c.eval(r));
  for (int it = 0; it < 5 && best != 0.0; ++it) {
    const auto df = c.deriv(r);
    if (std::abs(df) == 0.0) break;
    const auto step = c.eval(r) / df;
    const auto candidate = r - step;
    const double res = std::abs(c.eval(candidate));
    if (!(res < best)) break;
    r = candidate;
    best = res;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(r))) break;
  }
  return r;
}

inline SpectrumTag tag_roots(const std::array<std::complex<double>, 3>& roots) {
  double max_re = -std::numeric_limits<double>::infinity();
  double rad = 0.0;
  for (const auto& r : roots) {
    max_re = std::max(max_re, r.real());
    rad = std::max(rad, std::abs(r));
  }
  const double margin = 1e-9 * std::max(1.0, rad);
  if (std::fabs(max_re) <= margin) return SpectrumTag::Marginal;
  return max_re < 0.0 ? SpectrumTag::AllNegativeRealParts : SpectrumTag::HasPositiveRealPart;
}

}  // namespace detail

/// All three roots by the discriminant method on the depressed cubic,
/// followed by Newton polishing on the original cubic.
inline Spectrum cubic_roots(const CubicCoeffs& c) {
  const double shift = c.c2 / 3.0;
  const double p = c.c1 - c.c2 * c.c2 / 3.0;
  const double q = 2.0 * c.c2 * c.c2 * c.c2 / 27.0 - c.c2 * c.c1 / 3.0 + c.c0;

  std::array<std::complex<double>, 3> roots;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc >= 0.0) {
    // Three real roots (trigonometric form). p <= 0 is implied by disc >= 0.
    if (p >= 0.0) {
      roots = {std::complex<double>(-shift), std::complex<double>(-shift),
               std::complex<double>(-shift)};
    } else {
      const double m = 2.0 * std::sqrt(-p / 3.0);
      double arg = 3.0 * q / (p * m);
      arg = std::clamp(arg, -1.0, 1.0);
      const double theta = std::acos(arg) / 3.0;
      for (int i = 0; i < 3; ++i)
        roots[i] = m * std::cos(theta - 2.0 * std::numbers::pi * i / 3.0) - shift;
    }
  } else {
    // One real root, one complex conjugate pair.
    const double rad = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    const double u = std::cbrt(-q / 2.0 + (q > 0.0 ? -rad : rad));
    const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
    const double t_real = u + v;
    double real_root = t_real - shift;
    real_root = detail::newton_polish(c, real_root).real();
    // Deflate and solve the remaining quadratic.
    const double b = c.c2 + real_root;
    const double cc = c.c1 + real_root * b;
    const std::complex<double> sq = std::sqrt(std::complex<double>(b * b - 4.0 * cc));
    roots = {std::complex<double>(real_root), (-b + sq) / 2.0, (-b - sq) / 2.0};
  }

  for (auto& r : roots) r = detail::newton_polish(c, r);
  // Enforce exact conjugate symmetry on a genuinely complex pair.
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (roots[i].imag() != 0.0 && std::abs(roots[i] - std::conj(roots[j])) <
                                        1e-8 * std::max(1.0, std::abs(roots[i]))) {
        const auto mean = (roots[i] + std::conj(roots[j])) / 2.0;
        roots[i] = mean;
        roots[j] = std::conj(mean);
      }
  return Spectrum{roots, detail::tag_roots(roots)};
}

inline Spectrum eigenvalues(const Mat3& m) { return cubic_roots(char_poly(m)); }

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

struct EquilibriumClassification {
  Stability stability;
  Spectrum spectrum;
  bool routh_hurwitz_stable;  // c2*c1 > c0 with positive coefficients
};

inline EquilibriumClassification classify_equilibrium(const Params& p, const Vec3& e) {
  if (norm_inf(vector_field(p, e)) > 1e-10 * std::max(1.0, norm_inf(e)))
    throw std::invalid_argument("classify_equilibrium: point is not an equilibrium");
  const Spectrum sp = eigenvalues(jacobian(p, e));
  const CubicCoeffs c = char_poly(jacobian(p, e));
  const bool rh = c.c2 > 0.0 && c.c0 > 0.0 && c.c2 * c.c1 > c.c0;
  Stability st;
  switch (sp.tag) {
    case SpectrumTag::AllNegativeRealParts: st = Stability::Stable; break;
    case SpectrumTag::HasPositiveRealPart: st = Stability::Unstable; break;
    default: st = Stability::Marginal; break;
  }
  return {st, sp, rh};
}

struct HopfPoint {
  double k_h;    // bifurcation value of k
  double omega;  // frequency of the marginal pair
};

inline HopfPoint hopf_point(double k3, double k5) {
  if (!(k3 > 0.0 && k5 > 0.0)) throw std::invalid_argument("hopf_point: k3, k5 must be positive");
  return {k3 + k5, std::sqrt(k3 * k5)};
}

struct StableEigenpair {
  double eigenvalue;  // the unique negative real eigenvalue of Df(E)
  Vec3 eigenvector;   // unit norm, positive x component, sign pattern (+,+,-)
};

inline StableEigenpair stable_eigenpair_at_E(const Params& p) {
  p.validate();
  if (!(p.k > p.k3 + p.k5))
    throw std::domain_error("stable_eigenpair_at_E: requires k > k3 + k5");
  const Vec3 e = interior_equilibrium(p);
  const Spectrum sp = eigenvalues(jacobian(p, e));
  double lambda = 0.0;
  bool found = false;
  for (const auto& r : sp.roots) {
    if (std::fabs(r.imag()) < 1e-9 * std::max(1.0, sp.spectral_radius()) && r.real() < 0.0) {
      lambda = r.real();
      found = true;
    }
  }
  if (!found) throw std::runtime_error("stable_eigenpair_at_E: no negative real eigenvalue");

  // Solve (Df(E) - lambda I) v = 0 componentwise with v_x = 1:
  // row 2: k5 v_x = (k5 + lambda) v_z; row 1: (k3 + lambda) v_y = k3 v_z.
  const double vz = p.k5 / (p.k5 + lambda);
  const double vy = p.k3 * vz / (p.k3 + lambda);
  Vec3 v{1.0, vy, vz};
  const double n = norm(v);
  v = (1.0 / n) * v;
  return {lambda, v};
}

inline Vec3 stable_eigenvector_at_E(const Params& p) { return stable_eigenpair_at_E(p).eigenvector; }

/// Positive eigenvector of Df(0) for the unstable eigenvalue k (k > 0),
/// tangent to the one-dimensional unstable manifold of the origin.
inline Vec3 unstable_eigenvector_at_origin(const Params& p) {
  if (!(p.k > 0.0)) throw std::domain_error("unstable_eigenvector_at_origin: requires k > 0");
  Vec3 v{1.0, p.k3 * p.k5 / ((p.k3 + p.k) * (p.k5 + p.k)), p.k5 / (p.k5 + p.k)};
  return (1.0 / norm(v)) * v;
}

}  // namespace hopf

#endif  // HOPF_SPECTRAL_HPP
