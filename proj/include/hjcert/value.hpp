#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hjcert/containment.hpp"
#include "hjcert/grid.hpp"
#include "hjcert/legendre.hpp"

namespace hjcert {

/// Finite velocity search set standing in for the admissible controls.
struct VelocitySet {
  std::vector<Vector> velocities;
  std::string description;
};

/// 0 plus +-e_a * {1/4, 1/2, 1, 2} * v_ref on every axis, and in 2D the
/// diagonal combinations (+-s, +-s) for the same scales.
VelocitySet stencil_velocities(std::size_t dimension, double v_ref);
/// Tensor grid of `count` points per axis on [-v_max, v_max] (count is
/// bumped to the next odd number so that 0 is included).
VelocitySet uniform_velocities(std::size_t dimension, double v_max, std::size_t count);

/// Discrete dynamic-programming operator
///   (T u)(x) = max_{v in V, L(x,v) < inf} [a(x) - b L(x,v) + discount * u~(x + tau v)]
/// with u~ the multilinear interpolant (clamped on boxes, wrapped on tori).
/// Foot points, weights and costs are precomputed once.
class SemiLagrangianOperator {
 public:
  SemiLagrangianOperator(const HamiltonianSpec& h, const DomainGrid& grid, double tau, const VelocitySet& velocities,
                         std::span<const double> base, double cost_weight, double discount,
                         const ConjugateOptions& options = {});

  std::vector<double> apply(std::span<const double> values) const;
  double discount() const { return discount_; }
  std::size_t size() const { return offsets_.size() - 1; }

 private:
  std::size_t corners_ = 1;
  double discount_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<double> rewards_;
  std::vector<std::size_t> foot_nodes_;
  std::vector<double> foot_weights_;
};

struct StationaryOptions {
  double tau = 0.01;
  VelocitySet velocities;
  double tol = 1e-8;
  /// 0 selects the default from the contraction rate (see default_max_iterations).
  std::size_t max_iters = 0;
  ConjugateOptions conjugate;
};

/// Enough sweeps for a beta-contraction started at distance (2 |h|_inf + 1)
/// to reach tol, and never fewer than 10 * ceil(1 / (1 - beta)).
std::size_t default_max_iterations(double beta, double h_sup, double tol);

struct ValueField {
  DomainGrid grid;
  std::vector<double> values;
  double lambda = 0.0;
  double tau = 0.0;
  std::size_t iterations = 0;
  double final_update = 0.0;
  double tol = 0.0;
  VelocitySet velocities;
};

struct TimeValueField {
  DomainGrid grid;
  std::vector<double> times;
  /// layers[k][node] approximates v(node, times[k]).
  std::vector<std::vector<double>> layers;
  double lambda = 0.0;
  double tau = 0.0;
  VelocitySet velocities;
};

/// Stationary operator with beta = exp(-tau / lambda):
///   R(x) <- max_v [(1 - beta)(h(x) - lambda L(x,v)) + beta R~(x + tau v)]
/// iterated (Jacobi) from R = h until the sup-norm update is <= tol.
/// Throws ConvergenceError (carrying the last update) when max_iters runs
/// out and SchemeError when no velocity is admissible at some node.
ValueField solve_stationary(const HamiltonianSpec& h, const DomainGrid& grid, double lambda, const ScalarFn& payoff,
                            const StationaryOptions& options);

/// The operator used by solve_stationary, exposed for contraction checks.
SemiLagrangianOperator stationary_operator(const HamiltonianSpec& h, const DomainGrid& grid, double lambda,
                                           std::span<const double> payoff_values, double tau,
                                           const VelocitySet& velocities, const ConjugateOptions& options = {});

/// v(x, t_{k+1}) = max_v [-tau L(x,v) + e^{-lambda tau} v~(x + tau v, t_k)],
/// v(., 0) = u0 on the grid. T must be an integer multiple of tau.
TimeValueField solve_evolutionary(const HamiltonianSpec& h, const DomainGrid& grid, double lambda,
                                  const ScalarFn& initial, double horizon, double tau, const VelocitySet& velocities,
                                  const ConjugateOptions& options = {});

using VelocityCost = std::function<double(const Vector&)>;

/// max over nodes y of u0(y) - t L((y - x)/t) for a state-independent
/// conjugate L. Requires t > 0.
double hopf_lax(const DomainGrid& grid, std::span<const double> initial_values, const VelocityCost& cost,
                const Point& x, double t);

/// Discrete semicontinuous envelopes: max (usc) / min (lsc) over the
/// Chebyshev neighbourhood of `radius` cells.
std::vector<double> usc_regularize(const DomainGrid& grid, std::span<const double> values, int radius = 1);
std::vector<double> lsc_regularize(const DomainGrid& grid, std::span<const double> values, int radius = 1);
/// Space-time versions: the neighbourhood also spans `radius` layers.
std::vector<std::vector<double>> usc_regularize(const DomainGrid& grid,
                                                const std::vector<std::vector<double>>& layers, int radius = 1);
std::vector<std::vector<double>> lsc_regularize(const DomainGrid& grid,
                                                const std::vector<std::vector<double>>& layers, int radius = 1);

struct DppResidual {
  std::vector<double> residual;
  double max = 0.0;
  double max_abs = 0.0;
};

/// For each node x: the dynamic-programming right-hand side over the
/// one-segment curves x + t v (v in the field's velocity set, segment
/// inside the domain) on [0, T_test], minus R(x).
DppResidual dpp_residual(const HamiltonianSpec& h, const ValueField& field, const ScalarFn& payoff, double t_test,
                         std::size_t substeps = 16, const ConjugateOptions& options = {});

}  // namespace hjcert
