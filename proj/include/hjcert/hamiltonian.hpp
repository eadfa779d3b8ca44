#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hjcert/grid.hpp"
#include "hjcert/vector.hpp"

namespace hjcert {

enum class HamiltonianVariant { quadratic, transport_plus_quadratic, norm_type, isaacs_composite, custom };

std::string to_string(HamiltonianVariant v);

using HamiltonianFn = std::function<double(const Point& x, const Covector& p)>;
/// Analytic convex conjugate; may return +infinity.
using ConjugateFn = std::function<double(const Point& x, const Vector& v)>;
using PGradientFn = std::function<Vector(const Point& x, const Covector& p)>;

/// Affine vector field b(x) = offset + matrix * x.
struct AffineDrift {
  Vector offset;
  std::vector<Vector> matrix;  // rows; empty means zero matrix

  Vector operator()(const Point& x) const;
};

struct HamiltonianParts {
  HamiltonianFn evaluate;
  bool convex_in_p = true;
  std::optional<ConjugateFn> conjugate;
  std::optional<PGradientFn> p_gradient;
  /// Half-width of the p-search box per axis.
  Vector p_max;
  HamiltonianVariant variant = HamiltonianVariant::custom;
  /// Upper envelope used when certifying a containment function; composite
  /// Hamiltonians supply the max over their inner family here.
  std::optional<HamiltonianFn> containment_envelope;
  std::string description;
};

/// Evaluable Hamiltonian H(x, p) with structural metadata. Construction
/// checks H(x, 0) = 0 on every node of the supplied grid (tolerance 1e-12)
/// and that H is finite there.
class HamiltonianSpec {
 public:
  HamiltonianSpec(HamiltonianParts parts, const DomainGrid& grid);

  double operator()(const Point& x, const Covector& p) const { return parts_.evaluate(x, p); }
  bool convex_in_p() const { return parts_.convex_in_p; }
  bool has_conjugate() const { return parts_.conjugate.has_value(); }
  const std::optional<ConjugateFn>& conjugate() const { return parts_.conjugate; }
  bool has_p_gradient() const { return parts_.p_gradient.has_value(); }
  Vector p_gradient(const Point& x, const Covector& p) const;
  const Vector& p_max() const { return parts_.p_max; }
  HamiltonianVariant variant() const { return parts_.variant; }
  const std::string& description() const { return parts_.description; }
  /// H itself unless the spec provides a dedicated containment envelope.
  double containment_envelope(const Point& x, const Covector& p) const;
  std::size_t dimension() const { return parts_.p_max.size(); }

 private:
  HamiltonianParts parts_;
};

inline constexpr double kZeroMomentumTolerance = 1e-12;

/// H(p) = (a/2)|p|^2, conjugate |v|^2/(2a).
HamiltonianSpec quadratic_hamiltonian(const DomainGrid& grid, double coefficient = 1.0,
                                      double p_max = 4.0);
/// H(x,p) = |p|^2/2 + <b(x), p>, conjugate |v - b(x)|^2/2.
HamiltonianSpec transport_quadratic_hamiltonian(const DomainGrid& grid, AffineDrift drift,
                                                double p_max = 4.0);
/// H(p) = c|p|; conjugate is 0 on |v| <= c and +inf outside. Not
/// differentiable at p = 0, so no p-gradient is attached.
HamiltonianSpec norm_hamiltonian(const DomainGrid& grid, double speed = 1.0, double p_max = 4.0);
HamiltonianSpec custom_hamiltonian(const DomainGrid& grid, HamiltonianFn fn, bool convex,
                                   double p_max, std::string description = "custom");

/// Same evaluator and metadata with the analytic conjugate removed, so
/// conjugation goes through the numerical p-grid path.
HamiltonianSpec without_conjugate(const HamiltonianSpec& h, const DomainGrid& grid);

}  // namespace hjcert
