#include "hjcert/action.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hjcert/errors.hpp"

namespace hjcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_horizon(const Curve& curve, double horizon) {
  if (!(horizon >= 0.0) || horizon > curve.horizon() * (1.0 + 1e-15)) {
    throw PreconditionError("evaluation horizon exceeds the curve horizon");
  }
}

// Calls body(a, b, midpoint, velocity) for every piece of [0, horizon].
template <typename Body>
void for_each_piece(const Curve& curve, double horizon, Body&& body) {
  const auto& ts = curve.times();
  for (std::size_t i = 0; i < curve.segments() && ts[i] < horizon; ++i) {
    const double a = ts[i];
    const double b = std::min(ts[i + 1], horizon);
    const Point mid = curve.geometry().wrap(axpy(curve.points()[i], 0.5 * (b - a), curve.velocities()[i]));
    body(a, b, mid, curve.velocities()[i]);
  }
}

}  // namespace

double action_cost(const HamiltonianSpec& h, const Curve& curve, double horizon, const ConjugateOptions& options) {
  require_horizon(curve, horizon);
  double total = 0.0;
  bool infinite = false;
  for_each_piece(curve, horizon, [&](double a, double b, const Point& mid, const Vector& v) {
    if (infinite) return;
    const double l = lagrangian(h, mid, v, options);
    if (l == kInf) {
      infinite = true;
      return;
    }
    total += (b - a) * l;
  });
  return infinite ? kInf : total;
}

KernelPiece discount_piece(double a, double b, double lambda) {
  const double d = b - a;
  const double head = std::exp(-a / lambda);
  const double tail = -std::expm1(-d / lambda);
  if (!(head * tail > 0.0)) return {0.0, 0.5 * (a + b)};
  // int_0^d s e^{-s/lambda} ds / lambda = lambda - (d + lambda) e^{-d/lambda}
  const double moment = lambda * tail - d * (1.0 - tail);
  return {head * tail, a + moment / tail};
}

double j_lambda(const HamiltonianSpec& h, const Curve& curve, double lambda, const ScalarFn& payoff, double t_cut,
                const DiscountOptions& options) {
  if (!(lambda > 0.0)) throw PreconditionError("j_lambda needs lambda > 0");
  require_horizon(curve, t_cut);
  const double sub_len = lambda / options.substeps_per_lambda;
  double integral = 0.0;
  double accumulated = 0.0;
  bool infinite = false;
  for_each_piece(curve, t_cut, [&](double a, double b, const Point& mid, const Vector& v) {
    if (infinite) return;
    const double l = lagrangian(h, mid, v, options.conjugate);
    if (l == kInf) {
      infinite = true;
      return;
    }
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / sub_len)));
    const double dt = (b - a) / static_cast<double>(pieces);
    const std::size_t seg = curve.segment_at(a);
    for (std::size_t k = 0; k < pieces; ++k) {
      const double lo = a + static_cast<double>(k) * dt;
      const auto [w, tc] = discount_piece(lo, k + 1 == pieces ? b : lo + dt, lambda);
      const Point x = curve.geometry().wrap(axpy(curve.points()[seg], tc - curve.times()[seg], v));
      integral += w * (payoff(x) - accumulated - (tc - a) * l);
    }
    accumulated += (b - a) * l;
  });
  if (infinite) return -kInf;
  const Point end = curve.at(t_cut);
  const double rest = lagrangian(h, end, Vector(curve.dimension(), 0.0), options.conjugate);
  if (rest == kInf) return -kInf;
  return integral + std::exp(-t_cut / lambda) * (payoff(end) - accumulated - lambda * rest);
}

double w_lambda(const HamiltonianSpec& h, const Curve& curve, double t, double lambda, const ScalarFn& initial,
                const ConjugateOptions& options) {
  if (!(lambda >= 0.0)) throw PreconditionError("w_lambda needs lambda >= 0");
  require_horizon(curve, t);
  double running = 0.0;
  bool infinite = false;
  for_each_piece(curve, t, [&](double a, double b, const Point& mid, const Vector& v) {
    if (infinite) return;
    const double l = lagrangian(h, mid, v, options);
    if (l == kInf) {
      infinite = true;
      return;
    }
    const double weight = lambda == 0.0 ? b - a : (std::exp(-lambda * a) - std::exp(-lambda * b)) / lambda;
    running += weight * l;
  });
  if (infinite) return -kInf;
  return -running + std::exp(-lambda * t) * initial(curve.at(t));
}

double containment_check(const HamiltonianSpec& h, const ContainmentSpec& u, const Curve& curve, double horizon,
                         const ConjugateOptions& options) {
  const double cost = action_cost(h, curve, horizon, options);
  return u(curve.at(horizon)) - u(curve.points().front()) - cost - horizon * u.constant();
}

double young_residual(const HamiltonianSpec& h, const SmoothTestFunction& f, const Curve& curve, double horizon,
                      const ConjugateOptions& options) {
  require_horizon(curve, horizon);
  double pairing = 0.0;
  double cost = 0.0;
  for_each_piece(curve, horizon, [&](double a, double b, const Point& mid, const Vector& v) {
    const Covector df = f.differential(mid);
    pairing += (b - a) * dot(df, v);
    cost += (b - a) * (lagrangian(h, mid, v, options) + h(mid, df));
  });
  return pairing - cost;
}

InclusionPath diff_inclusion_path(const HamiltonianSpec& h, const SmoothTestFunction& f, const Geometry& geometry,
                                  const Point& x0, double horizon, double step, const InclusionOptions& options) {
  if (!h.has_p_gradient()) {
    throw CapabilityError("differential inclusion needs a differentiable selection of dH/dp");
  }
  if (!(step > 0.0) || !(horizon > 0.0) || step > horizon) {
    throw PreconditionError("differential inclusion needs 0 < step <= horizon");
  }
  const bool box = geometry.kind == DomainKind::box;
  auto field = [&](const Point& x) {
    Vector v = h.p_gradient(x, f.differential(x));
    if (box) {
      for (std::size_t a = 0; a < v.size(); ++a) {
        if ((x[a] <= geometry.lower[a] && v[a] < 0.0) || (x[a] >= geometry.upper[a] && v[a] > 0.0)) v[a] = 0.0;
      }
    }
    return v;
  };
  auto place = [&](Point x) { return geometry.wrap(std::move(x)); };

  const auto steps = static_cast<std::size_t>(std::llround(horizon / step));
  if (std::abs(static_cast<double>(steps) * step - horizon) > 1e-9 * horizon) {
    throw PreconditionError("horizon must be an integer multiple of the step");
  }
  std::vector<double> times{0.0};
  std::vector<Point> points{place(x0)};
  Point x = points.front();
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector k1 = field(x);
    const Vector k2 = field(place(axpy(x, 0.5 * step, k1)));
    const Vector k3 = field(place(axpy(x, 0.5 * step, k2)));
    const Vector k4 = field(place(axpy(x, step, k3)));
    Point next = x;
    for (std::size_t a = 0; a < next.size(); ++a) {
      next[a] += step / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    x = place(std::move(next));
    times.push_back(static_cast<double>(k + 1) * step);
    points.push_back(x);
  }
  times.back() = horizon;
  Curve curve(geometry, std::move(times), std::move(points));
  const double residual = young_residual(h, f, curve, horizon, options.conjugate);
  const double threshold = options.residual_constant * step * step * horizon + conjugate_tolerance(h, options.conjugate);
  if (!(std::abs(residual) <= threshold)) {
    std::ostringstream msg;
    msg << "Young-equality residual " << residual << " exceeds " << threshold;
    throw IntegrationError(msg.str(), residual);
  }
  return InclusionPath{std::move(curve), residual};
}

}  // namespace hjcert
