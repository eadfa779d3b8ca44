#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hjcert/vector.hpp"

namespace hjcert {

enum class DomainKind { box, torus };

/// Flat geometry of the state space: an axis-aligned box whose boundary
/// clamps, or a flat torus whose opposite faces are identified.
struct Geometry {
  DomainKind kind = DomainKind::box;
  Vector lower;
  Vector upper;

  std::size_t dimension() const { return lower.size(); }
  double period(std::size_t axis) const { return upper[axis] - lower[axis]; }

  /// Torus: reduce into [lower, upper). Box: clamp into [lower, upper].
  double wrap_coordinate(std::size_t axis, double x) const;
  Point wrap(Point x) const;
  /// Minimal-image displacement to - from on tori, plain difference on boxes.
  Vector displacement(std::span<const double> from, std::span<const double> to) const;
  double distance(std::span<const double> a, std::span<const double> b) const;
  bool contains(std::span<const double> x, double slack = 0.0) const;
};

struct DomainConfig {
  DomainKind kind = DomainKind::box;
  Vector lower;
  Vector upper;
  std::vector<std::size_t> nodes;
  std::size_t max_total_nodes = 20'000'000;
};

/// Multilinear interpolation weights for one query point: up to 2^d
/// (node, weight) pairs, weights summing to one.
struct Stencil {
  std::vector<std::size_t> nodes;
  std::vector<double> weights;

  double apply(std::span<const double> values) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * values[nodes[k]];
    return s;
  }
};

/// Uniform tensor grid on a box (nodes include both faces) or a torus
/// (nodes cover [lower, upper) with the upper face identified with lower).
/// Immutable after construction.
class DomainGrid {
 public:
  /// Validates the configuration: throws ConfigError on lower >= upper or
  /// fewer than 3 nodes on an axis, ResourceError when the node count
  /// exceeds max_total_nodes.
  static DomainGrid build(const DomainConfig& config);

  std::size_t dimension() const { return geometry_.dimension(); }
  DomainKind kind() const { return geometry_.kind; }
  bool is_torus() const { return geometry_.kind == DomainKind::torus; }
  const Geometry& geometry() const { return geometry_; }
  const Vector& lower() const { return geometry_.lower; }
  const Vector& upper() const { return geometry_.upper; }
  const std::vector<std::size_t>& nodes_per_axis() const { return nodes_; }
  const Vector& spacing() const { return spacing_; }
  /// Largest spacing over axes.
  double max_spacing() const;
  std::size_t size() const { return total_; }

  double coordinate(std::size_t axis, std::size_t i) const;
  Point point(std::size_t index) const;
  std::vector<std::size_t> multi_index(std::size_t index) const;
  std::size_t flat_index(std::span<const std::size_t> multi) const;
  /// Node nearest to x (after wrapping or clamping).
  std::size_t nearest_index(std::span<const double> x) const;
  /// Node closest to the geometric centre of the domain.
  std::size_t center_index() const;

  Point wrap(Point x) const { return geometry_.wrap(std::move(x)); }
  Vector displacement(std::span<const double> from, std::span<const double> to) const {
    return geometry_.displacement(from, to);
  }

  Stencil stencil(std::span<const double> x) const;
  double interpolate(std::span<const double> values, std::span<const double> x) const {
    return stencil(x).apply(values);
  }

  /// Indices of all nodes within Chebyshev distance `radius` (in cells) of
  /// `index`, including itself. Wraps on tori, truncates at box faces.
  std::vector<std::size_t> neighborhood(std::size_t index, int radius) const;

  std::vector<double> sample(const auto& fn) const {
    std::vector<double> out(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = fn(point(i));
    return out;
  }

 private:
  DomainGrid() = default;

  Geometry geometry_;
  std::vector<std::size_t> nodes_;
  std::vector<std::size_t> strides_;
  Vector spacing_;
  std::size_t total_ = 0;
};

}  // namespace hjcert
