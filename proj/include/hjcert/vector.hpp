#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hjcert {

// Tangent and cotangent spaces are identified with R^d through the
// Euclidean inner product, so all three share one representation.
using Vector = std::vector<double>;
using Point = Vector;
using Covector = Vector;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline Vector scaled(std::span<const double> a, double s) {
  Vector out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return out;
}

/// a + s * b
inline Vector axpy(std::span<const double> a, double s, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
  return out;
}

inline Vector difference(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

}  // namespace hjcert
