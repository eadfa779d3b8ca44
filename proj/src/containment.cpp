#include "hjcert/containment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hjcert/errors.hpp"

namespace hjcert {

ContainmentSpec::ContainmentSpec(ScalarFn value, GradientFn differential, double constant, bool certified,
                                 std::string kind, std::optional<Point> center)
    : value_(std::move(value)),
      differential_(std::move(differential)),
      constant_(constant),
      certified_(certified),
      kind_(std::move(kind)),
      center_(std::move(center)) {}

namespace {

ContainmentSpec log_containment(const DomainGrid& grid, const Point& center, double constant, bool certified) {
  const Geometry geom = grid.geometry();
  auto value = [geom, center](const Point& x) {
    const Vector d = geom.displacement(center, x);
    return 0.5 * std::log1p(dot(d, d));
  };
  auto differential = [geom, center](const Point& x) {
    Vector d = geom.displacement(center, x);
    const double s = 1.0 / (1.0 + dot(d, d));
    for (double& c : d) c *= s;
    return d;
  };
  return ContainmentSpec(value, differential, constant, certified, "log", center);
}

ContainmentSpec zero_containment(std::size_t dim) {
  return ContainmentSpec([](const Point&) { return 0.0; }, [dim](const Point&) { return Covector(dim, 0.0); },
                         0.0, true, "zero");
}

}  // namespace

double containment_supremum(const DomainGrid& grid, const HamiltonianSpec& h, const ContainmentSpec& u) {
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double v = h.containment_envelope(x, u.differential(x));
    if (!std::isfinite(v)) {
      throw EvaluationError("H(x, dU(x)) is not finite at node " + std::to_string(i));
    }
    sup = std::max(sup, v);
  }
  return sup;
}

void validate_containment(const DomainGrid& grid, const ContainmentSpec& u) {
  double inf = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = u(grid.point(i));
    if (!(v >= 0.0)) throw ConstructionError("containment function is negative at node " + std::to_string(i));
    if (v < inf) {
      inf = v;
      argmin = i;
    }
  }
  if (inf > 1e-9) {
    std::ostringstream msg;
    msg << "containment function has grid infimum " << inf << " > 1e-9";
    throw ConstructionError(msg.str());
  }
  if (grid.is_torus()) return;  // compact already

  // Rays along the axes and the main diagonals.
  const std::size_t d = grid.dimension();
  const Point origin = grid.point(argmin);
  std::vector<Vector> directions;
  for (std::size_t a = 0; a < d; ++a) {
    for (double s : {-1.0, 1.0}) {
      Vector e(d, 0.0);
      e[a] = s;
      directions.push_back(e);
    }
  }
  if (d > 1) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Vector e(d);
      for (std::size_t a = 0; a < d; ++a) e[a] = ((mask >> a) & 1u) ? 1.0 : -1.0;
      directions.push_back(e);
    }
  }
  constexpr int kSamples = 64;
  for (const Vector& e : directions) {
    // Distance to the box face along e.
    double reach = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < d; ++a) {
      if (e[a] > 0) reach = std::min(reach, (grid.upper()[a] - origin[a]) / e[a]);
      if (e[a] < 0) reach = std::min(reach, (grid.lower()[a] - origin[a]) / e[a]);
    }
    double previous = u(origin);
    for (int k = 1; k <= kSamples; ++k) {
      const Point x = axpy(origin, reach * k / kSamples, e);
      const double v = u(x);
      if (v < previous - 1e-15) {
        throw ConstructionError("containment function decreases along a ray from its minimiser");
      }
      previous = v;
    }
  }
}

ContainmentSpec standard_containment(const DomainGrid& grid, const HamiltonianSpec& h) {
  if (grid.is_torus()) return zero_containment(grid.dimension());
  const Point center = grid.point(grid.center_index());
  ContainmentSpec probe = log_containment(grid, center, 0.0, false);
  const double sup = containment_supremum(grid, h, probe);
  ContainmentSpec spec = log_containment(grid, center, sup + kContainmentMargin, true);
  validate_containment(grid, spec);
  return spec;
}

ContainmentSpec custom_containment(const DomainGrid& grid, const HamiltonianSpec& h, const Point& center,
                                   double constant) {
  ContainmentSpec probe = log_containment(grid, center, constant, false);
  validate_containment(grid, probe);
  const double sup = containment_supremum(grid, h, probe);
  return log_containment(grid, center, constant, sup <= constant);
}

}  // namespace hjcert
