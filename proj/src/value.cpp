#include "hjcert/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjcert/action.hpp"
#include "hjcert/errors.hpp"
#include "hjcert/parallel.hpp"

namespace hjcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

VelocitySet stencil_velocities(std::size_t dimension, double v_ref) {
  if (!(v_ref > 0.0)) throw ConfigError("stencil reference speed must be positive");
  VelocitySet set;
  set.velocities.push_back(Vector(dimension, 0.0));
  const double scales[] = {0.25, 0.5, 1.0, 2.0};
  for (double s : scales) {
    for (std::size_t a = 0; a < dimension; ++a) {
      for (double sign : {-1.0, 1.0}) {
        Vector v(dimension, 0.0);
        v[a] = sign * s * v_ref;
        set.velocities.push_back(v);
      }
    }
    if (dimension == 2) {
      for (double sx : {-1.0, 1.0}) {
        for (double sy : {-1.0, 1.0}) set.velocities.push_back({sx * s * v_ref, sy * s * v_ref});
      }
    }
  }
  std::ostringstream desc;
  desc << "stencil(v_ref=" << v_ref << ")";
  set.description = desc.str();
  return set;
}

VelocitySet uniform_velocities(std::size_t dimension, double v_max, std::size_t count) {
  if (!(v_max > 0.0)) throw ConfigError("uniform velocity bound must be positive");
  if (count < 3) count = 3;
  if (count % 2 == 0) ++count;
  const std::size_t half = count / 2;
  std::size_t total = 1;
  for (std::size_t a = 0; a < dimension; ++a) total *= count;
  VelocitySet set;
  set.velocities.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    Vector v(dimension);
    for (std::size_t a = 0; a < dimension; ++a) {
      const auto k = static_cast<long long>(rest % count) - static_cast<long long>(half);
      rest /= count;
      v[a] = v_max * static_cast<double>(k) / static_cast<double>(half);
    }
    set.velocities.push_back(std::move(v));
  }
  std::ostringstream desc;
  desc << "uniform(v_max=" << v_max << ", count=" << count << ")";
  set.description = desc.str();
  return set;
}

SemiLagrangianOperator::SemiLagrangianOperator(const HamiltonianSpec& h, const DomainGrid& grid, double tau,
                                               const VelocitySet& velocities, std::span<const double> base,
                                               double cost_weight, double discount, const ConjugateOptions& options)
    : corners_(std::size_t{1} << grid.dimension()), discount_(discount) {
  if (!(tau > 0.0)) throw PreconditionError("time step must be positive");
  if (velocities.velocities.empty()) throw PreconditionError("velocity set is empty");
  const std::size_t n = grid.size();
  const std::size_t m = velocities.velocities.size();

  // Per node, per velocity: cost (inf marks inadmissible) and foot stencil.
  std::vector<double> costs(n * m);
  std::vector<std::size_t> nodes(n * m * corners_, 0);
  std::vector<double> weights(n * m * corners_, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const Point x = grid.point(i);
    for (std::size_t j = 0; j < m; ++j) {
      const Vector& v = velocities.velocities[j];
      const double l = lagrangian(h, x, v, options);
      costs[i * m + j] = l;
      if (l == kInf) continue;
      const Stencil st = grid.stencil(axpy(x, tau, v));
      for (std::size_t k = 0; k < st.nodes.size(); ++k) {
        nodes[(i * m + j) * corners_ + k] = st.nodes[k];
        weights[(i * m + j) * corners_ + k] = st.weights[k];
      }
    }
  });

  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t admissible = 0;
    for (std::size_t j = 0; j < m; ++j) admissible += costs[i * m + j] < kInf ? 1 : 0;
    if (admissible == 0) throw SchemeError("no admissible velocity at node " + std::to_string(i));
    offsets_[i + 1] = offsets_[i] + admissible;
  }
  rewards_.resize(offsets_.back());
  foot_nodes_.resize(offsets_.back() * corners_);
  foot_weights_.resize(offsets_.back() * corners_);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t slot = offsets_[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double l = costs[i * m + j];
      if (l == kInf) continue;
      rewards_[slot] = base[i] - cost_weight * l;
      std::copy_n(nodes.begin() + static_cast<std::ptrdiff_t>((i * m + j) * corners_), corners_,
                  foot_nodes_.begin() + static_cast<std::ptrdiff_t>(slot * corners_));
      std::copy_n(weights.begin() + static_cast<std::ptrdiff_t>((i * m + j) * corners_), corners_,
                  foot_weights_.begin() + static_cast<std::ptrdiff_t>(slot * corners_));
      ++slot;
    }
  }
}

std::vector<double> SemiLagrangianOperator::apply(std::span<const double> values) const {
  const std::size_t n = size();
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    double best = -kInf;
    for (std::size_t c = offsets_[i]; c < offsets_[i + 1]; ++c) {
      double cont = 0.0;
      for (std::size_t k = 0; k < corners_; ++k) {
        cont += foot_weights_[c * corners_ + k] * values[foot_nodes_[c * corners_ + k]];
      }
      best = std::max(best, rewards_[c] + discount_ * cont);
    }
    out[i] = best;
  });
  return out;
}

std::size_t default_max_iterations(double beta, double h_sup, double tol) {
  const double floor_iters = 10.0 * std::ceil(1.0 / (1.0 - beta));
  const double needed = std::ceil(std::log((2.0 * h_sup + 1.0) / tol) / -std::log(beta)) + 10.0;
  return static_cast<std::size_t>(std::max(floor_iters, needed));
}

SemiLagrangianOperator stationary_operator(const HamiltonianSpec& h, const DomainGrid& grid, double lambda,
                                           std::span<const double> payoff_values, double tau,
                                           const VelocitySet& velocities, const ConjugateOptions& options) {
  if (!(lambda > 0.0)) throw PreconditionError("stationary problem needs lambda > 0");
  const double beta = std::exp(-tau / lambda);
  std::vector<double> base(payoff_values.begin(), payoff_values.end());
  for (double& b : base) b *= 1.0 - beta;
  return SemiLagrangianOperator(h, grid, tau, velocities, base, (1.0 - beta) * lambda, beta, options);
}

ValueField solve_stationary(const HamiltonianSpec& h, const DomainGrid& grid, double lambda, const ScalarFn& payoff,
                            const StationaryOptions& options) {
  const std::vector<double> hv = grid.sample(payoff);
  for (double v : hv) {
    if (!std::isfinite(v)) throw PreconditionError("payoff must be finite on the grid");
  }
  const SemiLagrangianOperator op =
      stationary_operator(h, grid, lambda, hv, options.tau, options.velocities, options.conjugate);
  const std::size_t max_iters =
      options.max_iters > 0 ? options.max_iters : default_max_iterations(op.discount(), max_abs(hv), options.tol);

  std::vector<double> current = hv;
  double update = kInf;
  std::size_t it = 0;
  while (it < max_iters) {
    std::vector<double> next = op.apply(current);
    update = sup_norm_diff(next, current);
    current = std::move(next);
    ++it;
    if (update <= options.tol) break;
  }
  if (!(update <= options.tol)) {
    std::ostringstream msg;
    msg << "stationary iteration did not converge in " << max_iters << " sweeps; last update " << update;
    throw ConvergenceError(msg.str(), update);
  }
  return ValueField{grid, std::move(current), lambda, options.tau, it, update, options.tol, options.velocities};
}

TimeValueField solve_evolutionary(const HamiltonianSpec& h, const DomainGrid& grid, double lambda,
                                  const ScalarFn& initial, double horizon, double tau, const VelocitySet& velocities,
                                  const ConjugateOptions& options) {
  if (!(lambda >= 0.0)) throw PreconditionError("evolutionary problem needs lambda >= 0");
  if (!(tau > 0.0) || !(horizon > 0.0)) throw PreconditionError("horizon and time step must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / tau));
  if (steps == 0 || std::abs(static_cast<double>(steps) * tau - horizon) > 1e-9 * horizon) {
    throw PreconditionError("horizon must be an integer multiple of the time step");
  }
  std::vector<double> u0 = grid.sample(initial);
  for (double v : u0) {
    if (!std::isfinite(v)) throw PreconditionError("initial datum must be finite on the grid");
  }
  const SemiLagrangianOperator op(h, grid, tau, velocities, std::vector<double>(grid.size(), 0.0), tau,
                                  std::exp(-lambda * tau), options);
  TimeValueField field{grid, {0.0}, {std::move(u0)}, lambda, tau, velocities};
  field.layers.reserve(steps + 1);
  for (std::size_t k = 1; k <= steps; ++k) {
    field.layers.push_back(op.apply(field.layers.back()));
    field.times.push_back(static_cast<double>(k) * tau);
  }
  return field;
}

double hopf_lax(const DomainGrid& grid, std::span<const double> initial_values, const VelocityCost& cost,
                const Point& x, double t) {
  if (!(t > 0.0)) throw PreconditionError("Hopf-Lax evaluation needs t > 0");
  double best = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector v = scaled(grid.displacement(x, grid.point(i)), 1.0 / t);
    const double l = cost(v);
    if (l == kInf) continue;
    best = std::max(best, initial_values[i] - t * l);
  }
  return best;
}

namespace {

template <typename Pick>
std::vector<double> envelope(const DomainGrid& grid, std::span<const double> values, int radius, Pick pick) {
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j : grid.neighborhood(i, radius)) out[i] = pick(out[i], values[j]);
  }
  return out;
}

template <typename Pick>
std::vector<std::vector<double>> envelope(const DomainGrid& grid, const std::vector<std::vector<double>>& layers,
                                          int radius, Pick pick) {
  const auto spatial = [&] {
    std::vector<std::vector<double>> s;
    s.reserve(layers.size());
    for (const auto& layer : layers) s.push_back(envelope(grid, layer, radius, pick));
    return s;
  }();
  std::vector<std::vector<double>> out = spatial;
  const auto count = static_cast<long long>(layers.size());
  for (long long k = 0; k < count; ++k) {
    for (long long o = -radius; o <= radius; ++o) {
      const long long j = k + o;
      if (j < 0 || j >= count || j == k) continue;
      auto& dst = out[static_cast<std::size_t>(k)];
      const auto& src = spatial[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = pick(dst[i], src[i]);
    }
  }
  return out;
}

const auto kMax = [](double a, double b) { return std::max(a, b); };
const auto kMin = [](double a, double b) { return std::min(a, b); };

}  // namespace

std::vector<double> usc_regularize(const DomainGrid& grid, std::span<const double> values, int radius) {
  return envelope(grid, values, radius, kMax);
}

std::vector<double> lsc_regularize(const DomainGrid& grid, std::span<const double> values, int radius) {
  return envelope(grid, values, radius, kMin);
}

std::vector<std::vector<double>> usc_regularize(const DomainGrid& grid,
                                                const std::vector<std::vector<double>>& layers, int radius) {
  return envelope(grid, layers, radius, kMax);
}

std::vector<std::vector<double>> lsc_regularize(const DomainGrid& grid,
                                                const std::vector<std::vector<double>>& layers, int radius) {
  return envelope(grid, layers, radius, kMin);
}

DppResidual dpp_residual(const HamiltonianSpec& h, const ValueField& field, const ScalarFn& payoff, double t_test,
                         std::size_t substeps, const ConjugateOptions& options) {
  if (!(t_test > 0.0)) throw PreconditionError("DPP horizon must be positive");
  if (substeps == 0) substeps = 1;
  const DomainGrid& grid = field.grid;
  const double lambda = field.lambda;
  const double dt = t_test / static_cast<double>(substeps);
  DppResidual out;
  out.residual.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const Point x = grid.point(i);
    double best = -kInf;
    for (const Vector& v : field.velocities.velocities) {
      const Point end = axpy(x, t_test, v);
      if (!grid.geometry().contains(end)) continue;
      const double l = lagrangian(h, grid.wrap(axpy(x, 0.5 * t_test, v)), v, options);
      if (l == kInf) continue;
      double integral = 0.0;
      for (std::size_t k = 0; k < substeps; ++k) {
        const auto [w, tc] = discount_piece(static_cast<double>(k) * dt, static_cast<double>(k + 1) * dt, lambda);
        integral += w * (payoff(grid.wrap(axpy(x, tc, v))) - tc * l);
      }
      const double tail = std::exp(-t_test / lambda) * (grid.interpolate(field.values, end) - t_test * l);
      best = std::max(best, integral + tail);
    }
    out.residual[i] = best - field.values[i];
  });
  out.max = *std::max_element(out.residual.begin(), out.residual.end());
  out.max_abs = max_abs(out.residual);
  return out;
}

}  // namespace hjcert
