#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjcert/action.hpp"
#include "hjcert/containment.hpp"
#include "hjcert/hamiltonian.hpp"
#include "hjcert/test_function.hpp"

namespace hjcert {

using Strategy = Vector;
/// Running cost I(x, theta1, theta2) paid by the maximising player's opponent.
using IsaacsCostFn = std::function<double(const Point& x, const Strategy& t1, const Strategy& t2)>;

/// Two-player game on finite strategy lists. inner[i][j] is the convex
/// Hamiltonian for the pair (theta1[i], theta2[j]).
struct IsaacsSpec {
  std::vector<Strategy> theta1;
  std::vector<Strategy> theta2;
  std::vector<std::vector<HamiltonianSpec>> inner;
  IsaacsCostFn cost;
  bool separable = false;
  std::string description = "isaacs";

  double composite_term(const Point& x, const Covector& p, std::size_t i, std::size_t j) const {
    return inner[i][j](x, p) - cost(x, theta1[i], theta2[j]);
  }
};

struct IsaacsValue {
  double value;
  std::size_t i;  // optimising index into theta1
  std::size_t j;  // optimising index into theta2
};

/// sup over theta1 of inf over theta2 of H_{theta1 theta2}(x,p) - I.
IsaacsValue h_upper(const IsaacsSpec& spec, const Point& x, const Covector& p);
/// inf over theta2 of sup over theta1.
IsaacsValue h_lower(const IsaacsSpec& spec, const Point& x, const Covector& p);

struct IsaacsValidity {
  bool shape_ok = true;
  bool cost_nonneg = true;
  bool zero_at_origin = true;
  /// Only meaningful when a containment spec was supplied.
  bool uniform_containment = true;
  std::vector<std::string> messages;

  bool valid() const { return shape_ok && cost_nonneg && zero_at_origin && uniform_containment; }
};

/// Checks I >= 0 and H_{theta1 theta2}(x,0) = 0 on every node and, when a
/// containment function is given, max over pairs of H(x, dU(x)) <= C.
IsaacsValidity validate_isaacs(const IsaacsSpec& spec, const DomainGrid& grid,
                               const std::optional<ContainmentSpec>& containment = std::nullopt);

inline constexpr double kIsaacsTolerance = 1e-9;

struct IsaacsGapReport {
  /// Per node: max over p samples of h_lower - h_upper.
  std::vector<double> gap;
  double max_gap = 0.0;
  double min_gap = 0.0;
  double tol = kIsaacsTolerance;
  bool holds = true;
  std::size_t samples = 0;
};

/// Throws PreconditionError when p_samples is empty.
IsaacsGapReport isaacs_gap(const IsaacsSpec& spec, const DomainGrid& grid, const std::vector<Covector>& p_samples,
                           double tol = kIsaacsTolerance);

/// The composite seen through the HamiltonianSpec interface (evaluator
/// h_upper). The analytic conjugate is kept for singleton games; the
/// p-gradient is kept when all inner gradients agree. Throws
/// PreconditionError for an invalid spec.
HamiltonianSpec isaacs_hamiltonian(const IsaacsSpec& spec, const DomainGrid& grid);

/// Standard containment with C taken from the max over all inner pairs.
ContainmentSpec isaacs_containment(const IsaacsSpec& spec, const DomainGrid& grid);

struct IsaacsEnvelopeReport {
  std::vector<double> residual;
  double max_residual = 0.0;
  /// Composite used for H: always "h_upper".
  std::string composite = "h_upper";
  /// Isaacs gap at the sampled momenta df and d f_dagger stayed within tolerance.
  bool condition_holds = true;
};

/// residual(x) = h_upper(x, d f_dagger(x)) - [(1 - eps) h_upper(x, df(x)) + eps C].
/// Throws ConfigError for eps outside (0,1).
IsaacsEnvelopeReport isaacs_envelope_check(const IsaacsSpec& spec, const SmoothTestFunction& f, double epsilon,
                                           const ContainmentSpec& containment, const DomainGrid& grid);

struct IsaacsInclusion {
  Curve curve;
  /// Young residual per (i, j), row-major over theta1 x theta2.
  std::vector<double> pair_residuals;
  double worst_residual = 0.0;
};

/// One curve for all strategy pairs; needs identical inner p-gradients
/// (checked on the grid) and throws CapabilityError otherwise.
IsaacsInclusion isaacs_diff_inclusion(const IsaacsSpec& spec, const SmoothTestFunction& f, const DomainGrid& grid,
                                      const Point& x0, double horizon, double step,
                                      const InclusionOptions& options = {});

/// Inner H = |p|^2/2 + <a(theta1) + b(theta2), p>, I = c1(theta1) + c2(theta2).
/// A strategy is the drift vector followed by its cost entry.
IsaacsSpec separable_quadratic_game(const DomainGrid& grid, std::vector<Strategy> theta1,
                                    std::vector<Strategy> theta2, double p_max = 4.0);

/// Inner H = |p|^2/2 for every pair, I = weight * theta1[0] * theta2[0].
IsaacsSpec coupled_cost_game(const DomainGrid& grid, std::vector<Strategy> theta1, std::vector<Strategy> theta2,
                             double weight = 1.0, double p_max = 4.0);

/// Inner H = |p|^2/2 for every pair, I = theta1.back() + theta2.back().
IsaacsSpec cost_only_game(const DomainGrid& grid, std::vector<Strategy> theta1, std::vector<Strategy> theta2,
                          double p_max = 4.0);

}  // namespace hjcert
