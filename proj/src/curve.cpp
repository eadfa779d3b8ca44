#include "hjcert/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjcert/errors.hpp"

namespace hjcert {

Curve::Curve(Geometry geometry, std::vector<double> times, std::vector<Point> points)
    : geometry_(std::move(geometry)), times_(std::move(times)), points_(std::move(points)) {
  if (times_.empty() || times_.size() != points_.size()) {
    throw PreconditionError("curve needs matching, nonempty knot times and points");
  }
  if (times_.front() != 0.0) throw PreconditionError("curve knot times must start at 0");
  if (times_.size() == 1) throw PreconditionError("curve needs at least one segment");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != geometry_.dimension()) throw PreconditionError("curve knot has wrong dimension");
    if (i + 1 < times_.size() && !(times_[i + 1] > times_[i])) {
      throw PreconditionError("curve knot times must be strictly increasing");
    }
    if (!geometry_.contains(points_[i], 1e-12)) throw PreconditionError("curve knot lies outside the box");
    points_[i] = geometry_.wrap(points_[i]);
  }
  velocities_.resize(times_.size() - 1);
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    velocities_[i] = scaled(geometry_.displacement(points_[i], points_[i + 1]), 1.0 / (times_[i + 1] - times_[i]));
  }
}

Curve Curve::constant(const Geometry& geometry, const Point& x, double horizon) {
  return Curve(geometry, {0.0, horizon}, {x, x});
}

Curve Curve::linear(const Geometry& geometry, const Point& x0, const Vector& velocity, double horizon) {
  // Knots closer than a quarter period keep the minimal-image velocity exact.
  std::size_t pieces = 1;
  if (geometry.kind == DomainKind::torus) {
    for (std::size_t a = 0; a < velocity.size(); ++a) {
      const double travel = std::abs(velocity[a]) * horizon / (0.25 * geometry.period(a));
      pieces = std::max(pieces, static_cast<std::size_t>(std::ceil(travel)));
    }
  }
  std::vector<double> times(pieces + 1);
  std::vector<Point> points(pieces + 1);
  for (std::size_t k = 0; k <= pieces; ++k) {
    times[k] = horizon * static_cast<double>(k) / static_cast<double>(pieces);
    points[k] = geometry.wrap(axpy(x0, times[k], velocity));
  }
  times.back() = horizon;
  return Curve(geometry, std::move(times), std::move(points));
}

std::size_t Curve::segment_at(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(i, segments() - 1);
}

Point Curve::at(double t) const {
  const std::size_t i = segment_at(t);
  if (t == times_[i]) return points_[i];
  if (i + 1 < times_.size() && t == times_[i + 1]) return points_[i + 1];
  return geometry_.wrap(axpy(points_[i], t - times_[i], velocities_[i]));
}

Curve shift(const Curve& curve, double tau) {
  if (!(tau >= 0.0) || !(tau < curve.horizon())) {
    throw PreconditionError("shift time must lie in [0, horizon)");
  }
  const auto& ts = curve.times();
  std::vector<double> times{0.0};
  std::vector<Point> points{curve.at(tau)};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] > tau) {
      times.push_back(ts[i] - tau);
      points.push_back(curve.points()[i]);
    }
  }
  return Curve(curve.geometry(), std::move(times), std::move(points));
}

Curve concat(const Curve& first, const Curve& second, double tau) {
  if (!(tau > 0.0) || tau > first.horizon()) {
    throw PreconditionError("splice time must lie in (0, horizon of the first curve]");
  }
  const Point join = first.at(tau);
  const double gap = first.geometry().distance(join, second.points().front());
  if (gap > 1e-9) {
    std::ostringstream msg;
    msg << "curves do not meet at the splice time: gap " << gap;
    throw SpliceError(msg.str(), gap);
  }
  std::vector<double> times;
  std::vector<Point> points;
  const auto& ts = first.times();
  for (std::size_t i = 0; i < ts.size() && ts[i] < tau; ++i) {
    times.push_back(ts[i]);
    points.push_back(first.points()[i]);
  }
  times.push_back(tau);
  points.push_back(join);
  for (std::size_t i = 1; i < second.times().size(); ++i) {
    times.push_back(tau + second.times()[i]);
    points.push_back(second.points()[i]);
  }
  return Curve(first.geometry(), std::move(times), std::move(points));
}

}  // namespace hjcert
