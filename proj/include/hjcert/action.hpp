#pragma once

#include <functional>

#include "hjcert/containment.hpp"
#include "hjcert/curve.hpp"
#include "hjcert/legendre.hpp"
#include "hjcert/test_function.hpp"

namespace hjcert {

/// Running cost integral over [0, T]: segment length times L at the
/// segment midpoint (velocity is constant per segment). +infinity as soon
/// as one segment has infinite cost. Requires T <= horizon.
double action_cost(const HamiltonianSpec& h, const Curve& curve, double horizon,
                   const ConjugateOptions& options = {});

/// Mass and centroid of the kernel (1/lambda) e^{-t/lambda} on [a, b].
/// Integrands that are affine in t are integrated exactly by
/// weight * value(centroid).
struct KernelPiece {
  double weight;
  double centroid;
};
KernelPiece discount_piece(double a, double b, double lambda);

struct DiscountOptions {
  /// Sub-intervals per unit of lambda; each segment gets at least one.
  double substeps_per_lambda = 64.0;
  ConjugateOptions conjugate;
};

/// Discounted payoff: integral over [0, T_cut] of
/// (1/lambda) e^{-t/lambda} (h(gamma(t)) - A(t)) dt with A the accumulated
/// cost, plus the exact contribution of the curve frozen at gamma(T_cut)
/// afterwards: e^{-T_cut/lambda} (h(gamma(T_cut)) - A(T_cut) - lambda L(gamma(T_cut), 0)).
/// Returns -infinity when the cost is infinite.
double j_lambda(const HamiltonianSpec& h, const Curve& curve, double lambda, const ScalarFn& payoff, double t_cut,
                const DiscountOptions& options = {});

/// -int_0^t e^{-lambda s} L ds + e^{-lambda t} u0(gamma(t)); the kernel is
/// integrated exactly per segment with L frozen at the segment midpoint.
double w_lambda(const HamiltonianSpec& h, const Curve& curve, double t, double lambda, const ScalarFn& initial,
                const ConjugateOptions& options = {});

/// U(gamma(T)) - U(gamma(0)) - action(gamma, T) - T C; nonpositive (up to
/// tolerance) for certified containment functions.
double containment_check(const HamiltonianSpec& h, const ContainmentSpec& u, const Curve& curve, double horizon,
                         const ConjugateOptions& options = {});

/// int <df(gamma), gamma'> - int [L(gamma, gamma') + H(gamma, df(gamma))]
/// on [0, T] with midpoint evaluation per segment.
double young_residual(const HamiltonianSpec& h, const SmoothTestFunction& f, const Curve& curve, double horizon,
                      const ConjugateOptions& options = {});

struct InclusionOptions {
  /// Accept when |Young residual| <= residual_constant * step^2 * T + tolerance,
  /// where tolerance is the conjugate tolerance.
  double residual_constant = 1.0;
  ConjugateOptions conjugate;
};

struct InclusionPath {
  Curve curve;
  double young_residual;
};

/// Integrates gamma' = dH/dp(gamma, df(gamma)) with classical RK4. On boxes
/// outward velocity components are zeroed at the faces and states are
/// clamped. Throws CapabilityError when H has no p-gradient,
/// PreconditionError for bad step/horizon, IntegrationError when the Young
/// residual exceeds the acceptance threshold.
InclusionPath diff_inclusion_path(const HamiltonianSpec& h, const SmoothTestFunction& f, const Geometry& geometry,
                                  const Point& x0, double horizon, double step, const InclusionOptions& options = {});

}  // namespace hjcert
