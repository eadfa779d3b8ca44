#include "hjcert/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjcert/errors.hpp"

namespace hjcert {

double Geometry::wrap_coordinate(std::size_t axis, double x) const {
  const double lo = lower[axis];
  const double hi = upper[axis];
  if (kind == DomainKind::box) return std::clamp(x, lo, hi);
  const double p = hi - lo;
  double r = std::fmod(x - lo, p);
  if (r < 0.0) r += p;
  // fmod can return p itself after the negative correction.
  if (r >= p) r -= p;
  return lo + r;
}

Point Geometry::wrap(Point x) const {
  for (std::size_t a = 0; a < x.size(); ++a) x[a] = wrap_coordinate(a, x[a]);
  return x;
}

Vector Geometry::displacement(std::span<const double> from, std::span<const double> to) const {
  Vector d(from.size());
  for (std::size_t a = 0; a < d.size(); ++a) {
    double delta = to[a] - from[a];
    if (kind == DomainKind::torus) {
      const double p = period(a);
      delta -= p * std::round(delta / p);
    }
    d[a] = delta;
  }
  return d;
}

double Geometry::distance(std::span<const double> a, std::span<const double> b) const {
  return norm(displacement(a, b));
}

bool Geometry::contains(std::span<const double> x, double slack) const {
  if (kind == DomainKind::torus) return true;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] < lower[a] - slack || x[a] > upper[a] + slack) return false;
  }
  return true;
}

DomainGrid DomainGrid::build(const DomainConfig& config) {
  const std::size_t d = config.lower.size();
  if (d == 0) throw ConfigError("domain dimension must be at least 1");
  if (config.upper.size() != d || config.nodes.size() != d) {
    throw ConfigError("domain lower/upper/nodes must have equal length");
  }
  DomainGrid g;
  g.geometry_ = Geometry{config.kind, config.lower, config.upper};
  g.nodes_ = config.nodes;
  g.spacing_.resize(d);
  g.strides_.resize(d);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(config.lower[a] < config.upper[a]) || !std::isfinite(config.upper[a] - config.lower[a])) {
      throw ConfigError("malformed corners on axis " + std::to_string(a) + ": lower must be < upper");
    }
    if (config.nodes[a] < 3) {
      throw ConfigError("axis " + std::to_string(a) + " needs at least 3 nodes");
    }
    const double cells = config.kind == DomainKind::box ? static_cast<double>(config.nodes[a] - 1)
                                                        : static_cast<double>(config.nodes[a]);
    g.spacing_[a] = (config.upper[a] - config.lower[a]) / cells;
    g.strides_[a] = total;
    if (total > config.max_total_nodes / config.nodes[a]) {
      throw ResourceError("grid exceeds the node cap of " + std::to_string(config.max_total_nodes));
    }
    total *= config.nodes[a];
  }
  g.total_ = total;
  return g;
}

double DomainGrid::max_spacing() const { return *std::max_element(spacing_.begin(), spacing_.end()); }

double DomainGrid::coordinate(std::size_t axis, std::size_t i) const {
  const double lo = lower()[axis];
  const double hi = upper()[axis];
  const double cells = is_torus() ? static_cast<double>(nodes_[axis])
                                  : static_cast<double>(nodes_[axis] - 1);
  return lo + (hi - lo) * static_cast<double>(i) / cells;
}

Point DomainGrid::point(std::size_t index) const {
  Point x(dimension());
  for (std::size_t a = 0; a < x.size(); ++a) {
    x[a] = coordinate(a, (index / strides_[a]) % nodes_[a]);
  }
  return x;
}

std::vector<std::size_t> DomainGrid::multi_index(std::size_t index) const {
  std::vector<std::size_t> m(dimension());
  for (std::size_t a = 0; a < m.size(); ++a) m[a] = (index / strides_[a]) % nodes_[a];
  return m;
}

std::size_t DomainGrid::flat_index(std::span<const std::size_t> multi) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < multi.size(); ++a) idx += multi[a] * strides_[a];
  return idx;
}

std::size_t DomainGrid::nearest_index(std::span<const double> x) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < dimension(); ++a) {
    const double xa = geometry_.wrap_coordinate(a, x[a]);
    auto i = static_cast<long long>(std::llround((xa - lower()[a]) / spacing_[a]));
    const auto n = static_cast<long long>(nodes_[a]);
    if (is_torus()) {
      i = ((i % n) + n) % n;
    } else {
      i = std::clamp(i, 0LL, n - 1);
    }
    idx += static_cast<std::size_t>(i) * strides_[a];
  }
  return idx;
}

std::size_t DomainGrid::center_index() const {
  Point c(dimension());
  for (std::size_t a = 0; a < c.size(); ++a) c[a] = 0.5 * (lower()[a] + upper()[a]);
  return nearest_index(c);
}

Stencil DomainGrid::stencil(std::span<const double> x) const {
  const std::size_t d = dimension();
  std::vector<std::size_t> base(d), next(d);
  Vector frac(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double xa = geometry_.wrap_coordinate(a, x[a]);
    const double s = (xa - lower()[a]) / spacing_[a];
    const std::size_t n = nodes_[a];
    if (is_torus()) {
      auto i = static_cast<std::size_t>(std::floor(s));
      if (i >= n) i = n - 1;
      base[a] = i;
      next[a] = (i + 1) % n;
      frac[a] = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
    } else {
      auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 2)));
      base[a] = i;
      next[a] = i + 1;
      frac[a] = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
    }
  }
  Stencil st;
  const std::size_t corners = std::size_t{1} << d;
  st.nodes.reserve(corners);
  st.weights.reserve(corners);
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool hi = (c >> a) & 1u;
      w *= hi ? frac[a] : 1.0 - frac[a];
      idx += (hi ? next[a] : base[a]) * strides_[a];
    }
    if (w == 0.0) continue;
    st.nodes.push_back(idx);
    st.weights.push_back(w);
  }
  if (st.nodes.empty()) {
    st.nodes.push_back(flat_index(base));
    st.weights.push_back(1.0);
  }
  return st;
}

std::vector<std::size_t> DomainGrid::neighborhood(std::size_t index, int radius) const {
  const std::size_t d = dimension();
  const auto center = multi_index(index);
  std::vector<std::size_t> out;
  const int width = 2 * radius + 1;
  std::size_t combos = 1;
  for (std::size_t a = 0; a < d; ++a) combos *= static_cast<std::size_t>(width);
  std::vector<std::size_t> m(d);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rest = c;
    bool inside = true;
    for (std::size_t a = 0; a < d && inside; ++a) {
      const int off = static_cast<int>(rest % static_cast<std::size_t>(width)) - radius;
      rest /= static_cast<std::size_t>(width);
      const auto n = static_cast<long long>(nodes_[a]);
      long long i = static_cast<long long>(center[a]) + off;
      if (is_torus()) {
        i = ((i % n) + n) % n;
      } else if (i < 0 || i >= n) {
        inside = false;
      }
      m[a] = static_cast<std::size_t>(i);
    }
    if (inside) out.push_back(flat_index(m));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace hjcert
