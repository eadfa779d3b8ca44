#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hjcert/grid.hpp"
#include "hjcert/hamiltonian.hpp"

namespace hjcert {

using ScalarFn = std::function<double(const Point&)>;
using GradientFn = std::function<Covector(const Point&)>;

/// Containment (Lyapunov) function: nonnegative, vanishing somewhere,
/// with bounded sublevel sets, together with the constant C bounding
/// H(x, dU(x)) from above.
class ContainmentSpec {
 public:
  ContainmentSpec(ScalarFn value, GradientFn differential, double constant, bool certified,
                  std::string kind, std::optional<Point> center = std::nullopt);

  double operator()(const Point& x) const { return value_(x); }
  Covector differential(const Point& x) const { return differential_(x); }
  double constant() const { return constant_; }
  bool certified() const { return certified_; }
  const std::string& kind() const { return kind_; }
  const std::optional<Point>& center() const { return center_; }

 private:
  ScalarFn value_;
  GradientFn differential_;
  double constant_;
  bool certified_;
  std::string kind_;
  std::optional<Point> center_;
};

inline constexpr double kContainmentMargin = 1e-6;

/// U(x) = 0.5 log(1 + |x - c|^2) with c the grid node nearest the domain
/// centre; on tori U = 0 and C = 0. C is the grid supremum of
/// H(x, dU(x)) (through the Hamiltonian's containment envelope) plus
/// kContainmentMargin. Throws EvaluationError if that supremum is not finite.
ContainmentSpec standard_containment(const DomainGrid& grid, const HamiltonianSpec& h);

/// Same log-type function around a caller-chosen node with a caller-chosen
/// constant; certified iff the grid supremum does not exceed it.
ContainmentSpec custom_containment(const DomainGrid& grid, const HamiltonianSpec& h, const Point& center,
                                   double constant);

/// max over grid nodes of H(x, dU(x)) using the containment envelope.
double containment_supremum(const DomainGrid& grid, const HamiltonianSpec& h, const ContainmentSpec& u);

/// Checks inf U = 0 on the grid (1e-9) and monotone growth along sampled
/// rays from the minimiser; throws ConstructionError on violation.
void validate_containment(const DomainGrid& grid, const ContainmentSpec& u);

}  // namespace hjcert
