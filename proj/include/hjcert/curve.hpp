#pragma once

#include <vector>

#include "hjcert/grid.hpp"

namespace hjcert {

/// Piecewise-linear admissible curve on [0, t_m]. Velocities are derived
/// from consecutive knots (minimal-image displacement on tori), so
/// x_{i+1} = wrap(x_i + v_i (t_{i+1} - t_i)) holds to rounding.
class Curve {
 public:
  /// Throws PreconditionError unless times start at 0 and increase strictly,
  /// there is at least one knot, and (on boxes) all knots lie in the domain.
  Curve(Geometry geometry, std::vector<double> times, std::vector<Point> points);

  static Curve constant(const Geometry& geometry, const Point& x, double horizon);
  static Curve linear(const Geometry& geometry, const Point& x0, const Vector& velocity, double horizon);

  const Geometry& geometry() const { return geometry_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Vector>& velocities() const { return velocities_; }
  std::size_t segments() const { return velocities_.size(); }
  double horizon() const { return times_.back(); }
  std::size_t dimension() const { return geometry_.dimension(); }

  /// Segment containing t (the last segment for t = horizon).
  std::size_t segment_at(double t) const;
  Point at(double t) const;

 private:
  Geometry geometry_;
  std::vector<double> times_;
  std::vector<Point> points_;
  std::vector<Vector> velocities_;
};

/// t -> gamma(t + tau) on [0, horizon - tau], re-knotted at tau.
/// Requires 0 <= tau < horizon.
Curve shift(const Curve& curve, double tau);

/// gamma1 on [0, tau] followed by gamma2(t - tau). Throws SpliceError with
/// the gap when gamma2(0) and gamma1(tau) differ by more than 1e-9.
Curve concat(const Curve& first, const Curve& second, double tau);

}  // namespace hjcert
