#include "hjcert/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hjcert/errors.hpp"

namespace hjcert {

std::string to_string(HamiltonianVariant v) {
  switch (v) {
    case HamiltonianVariant::quadratic: return "quadratic";
    case HamiltonianVariant::transport_plus_quadratic: return "transport-plus-quadratic";
    case HamiltonianVariant::norm_type: return "norm-type";
    case HamiltonianVariant::isaacs_composite: return "isaacs-composite";
    case HamiltonianVariant::custom: return "custom";
  }
  return "custom";
}

Vector AffineDrift::operator()(const Point& x) const {
  Vector b = offset.empty() ? Vector(x.size(), 0.0) : offset;
  for (std::size_t r = 0; r < matrix.size(); ++r) b[r] += dot(matrix[r], x);
  return b;
}

HamiltonianSpec::HamiltonianSpec(HamiltonianParts parts, const DomainGrid& grid)
    : parts_(std::move(parts)) {
  if (!parts_.evaluate) throw ConstructionError("Hamiltonian needs an evaluator");
  if (parts_.p_max.size() != grid.dimension()) {
    throw ConstructionError("p_max must have one entry per axis");
  }
  for (double r : parts_.p_max) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConstructionError("p_max entries must be positive");
  }
  const Covector zero(grid.dimension(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double h0 = parts_.evaluate(x, zero);
    if (!std::isfinite(h0) || std::abs(h0) > kZeroMomentumTolerance) {
      std::ostringstream msg;
      msg << "H(x,0) = " << h0 << " at node " << i << "; the Hamiltonian must vanish at p = 0";
      throw ConstructionError(msg.str());
    }
  }
}

Vector HamiltonianSpec::p_gradient(const Point& x, const Covector& p) const {
  if (!parts_.p_gradient) throw CapabilityError("Hamiltonian '" + parts_.description + "' has no p-gradient");
  return (*parts_.p_gradient)(x, p);
}

double HamiltonianSpec::containment_envelope(const Point& x, const Covector& p) const {
  return parts_.containment_envelope ? (*parts_.containment_envelope)(x, p) : parts_.evaluate(x, p);
}

HamiltonianSpec quadratic_hamiltonian(const DomainGrid& grid, double coefficient, double p_max) {
  if (!(coefficient > 0.0)) throw ConfigError("quadratic coefficient must be positive");
  HamiltonianParts parts;
  parts.evaluate = [coefficient](const Point&, const Covector& p) { return 0.5 * coefficient * dot(p, p); };
  parts.conjugate = [coefficient](const Point&, const Vector& v) { return dot(v, v) / (2.0 * coefficient); };
  parts.p_gradient = [coefficient](const Point&, const Covector& p) { return scaled(p, coefficient); };
  parts.p_max = Vector(grid.dimension(), p_max);
  parts.variant = HamiltonianVariant::quadratic;
  parts.description = "quadratic";
  return HamiltonianSpec(std::move(parts), grid);
}

HamiltonianSpec transport_quadratic_hamiltonian(const DomainGrid& grid, AffineDrift drift, double p_max) {
  const std::size_t d = grid.dimension();
  if (!drift.offset.empty() && drift.offset.size() != d) throw ConfigError("drift offset has wrong dimension");
  if (!drift.matrix.empty()) {
    if (drift.matrix.size() != d) throw ConfigError("drift matrix has wrong row count");
    for (const auto& row : drift.matrix) {
      if (row.size() != d) throw ConfigError("drift matrix has wrong column count");
    }
  }
  HamiltonianParts parts;
  parts.evaluate = [drift](const Point& x, const Covector& p) { return 0.5 * dot(p, p) + dot(drift(x), p); };
  parts.conjugate = [drift](const Point& x, const Vector& v) {
    const Vector w = difference(v, drift(x));
    return 0.5 * dot(w, w);
  };
  parts.p_gradient = [drift](const Point& x, const Covector& p) {
    Vector g = drift(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += p[i];
    return g;
  };
  parts.p_max = Vector(d, p_max);
  parts.variant = HamiltonianVariant::transport_plus_quadratic;
  parts.description = "transport-plus-quadratic";
  return HamiltonianSpec(std::move(parts), grid);
}

HamiltonianSpec norm_hamiltonian(const DomainGrid& grid, double speed, double p_max) {
  if (!(speed > 0.0)) throw ConfigError("norm speed must be positive");
  HamiltonianParts parts;
  parts.evaluate = [speed](const Point&, const Covector& p) { return speed * norm(p); };
  parts.conjugate = [speed](const Point&, const Vector& v) {
    return norm(v) <= speed ? 0.0 : std::numeric_limits<double>::infinity();
  };
  parts.p_max = Vector(grid.dimension(), p_max);
  parts.variant = HamiltonianVariant::norm_type;
  parts.description = "norm-type";
  return HamiltonianSpec(std::move(parts), grid);
}

HamiltonianSpec custom_hamiltonian(const DomainGrid& grid, HamiltonianFn fn, bool convex, double p_max,
                                   std::string description) {
  HamiltonianParts parts;
  parts.evaluate = std::move(fn);
  parts.convex_in_p = convex;
  parts.p_max = Vector(grid.dimension(), p_max);
  parts.variant = HamiltonianVariant::custom;
  parts.description = std::move(description);
  return HamiltonianSpec(std::move(parts), grid);
}

HamiltonianSpec without_conjugate(const HamiltonianSpec& h, const DomainGrid& grid) {
  HamiltonianParts parts;
  parts.evaluate = [h](const Point& x, const Covector& p) { return h(x, p); };
  parts.convex_in_p = h.convex_in_p();
  if (h.has_p_gradient()) {
    parts.p_gradient = [h](const Point& x, const Covector& p) { return h.p_gradient(x, p); };
  }
  parts.p_max = h.p_max();
  parts.variant = h.variant();
  parts.containment_envelope = [h](const Point& x, const Covector& p) { return h.containment_envelope(x, p); };
  parts.description = h.description() + " (numerical conjugate)";
  return HamiltonianSpec(std::move(parts), grid);
}

}  // namespace hjcert
