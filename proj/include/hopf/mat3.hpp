#ifndef HOPF_MAT3_HPP
#define HOPF_MAT3_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace hopf {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const Vec3& a) { return std::max({std::fabs(a[0]), std::fabs(a[1]), std::fabs(a[2])}); }

inline double min_component(const Vec3& a) { return std::min({a[0], a[1], a[2]}); }
inline double max_component(const Vec3& a) { return std::max({a[0], a[1], a[2]}); }

/// Dense 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> e{};

  double& operator()(std::size_t i, std::size_t j) { return e[3 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return e[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }

  static Mat3 diagonal(double d0, double d1, double d2) {
    Mat3 m;
    m(0, 0) = d0;
    m(1, 1) = d1;
    m(2, 2) = d2;
    return m;
  }

  double trace() const { return e[0] + e[4] + e[8]; }

  double det() const {
    return e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
           e[2] * (e[3] * e[7] - e[4] * e[6]);
  }

  /// Sum of the three principal 2x2 minors.
  double minor_sum() const {
    return (e[4] * e[8] - e[5] * e[7]) + (e[0] * e[8] - e[2] * e[6]) + (e[0] * e[4] - e[1] * e[3]);
  }

  bool finite() const {
    for (double v : e)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return c;
}

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
          a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
          a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
}

inline Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (std::size_t i = 0; i < 9; ++i) c.e[i] = a.e[i] + b.e[i];
  return c;
}

inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (std::size_t i = 0; i < 9; ++i) c.e[i] = a.e[i] - b.e[i];
  return c;
}

inline Mat3 operator*(double s, const Mat3& a) {
  Mat3 c;
  for (std::size_t i = 0; i < 9; ++i) c.e[i] = s * a.e[i];
  return c;
}

inline Mat3 inverse(const Mat3& a) {
  const double d = a.det();
  Mat3 inv;
  inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
  inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
  inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
  inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
  inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
  inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
  inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
  inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
  inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
  return inv;
}

inline double max_abs_entry(const Mat3& a) {
  double m = 0.0;
  for (double v : a.e) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace hopf

#endif  // HOPF_MAT3_HPP
