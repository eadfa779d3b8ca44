#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjcert/containment.hpp"
#include "hjcert/test_function.hpp"
#include "hjcert/value.hpp"

namespace hjcert {

enum class PairKind { dagger, ddagger };

std::string to_string(PairKind k);

/// Regularised test pair built from a smooth f, a containment function U
/// and the constant C:
///   dagger:  f = (1 - eps) f + eps U,  g = (1 - eps) H(x, df) + eps C
///   ddagger: f = (1 + eps) f - eps U,  g = (1 + eps) H(x, df) - eps C
/// Values on the grid nodes are memoised at construction.
class DaggerPair {
 public:
  PairKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  const SmoothTestFunction& base() const { return base_; }

  double f(const Point& x) const;
  double g(const Point& x) const;
  /// Differential of the composite f.
  Covector df(const Point& x) const;

  std::span<const double> f_nodes() const { return f_nodes_; }
  std::span<const double> g_nodes() const { return g_nodes_; }

 private:
  friend DaggerPair build_pair(PairKind, const SmoothTestFunction&, double, const ContainmentSpec&,
                               const HamiltonianSpec&, const DomainGrid&);
  DaggerPair(PairKind kind, SmoothTestFunction base, double epsilon, ContainmentSpec containment,
             HamiltonianSpec hamiltonian);

  PairKind kind_;
  SmoothTestFunction base_;
  double epsilon_;
  ContainmentSpec containment_;
  HamiltonianSpec hamiltonian_;
  std::vector<double> f_nodes_;
  std::vector<double> g_nodes_;
};

/// Throws ConfigError for eps outside (0,1) and PreconditionError when f
/// lacks the required bound (lower for dagger, upper for ddagger).
DaggerPair build_pair(PairKind kind, const SmoothTestFunction& f, double epsilon, const ContainmentSpec& containment,
                      const HamiltonianSpec& h, const DomainGrid& grid);
DaggerPair build_dagger(const SmoothTestFunction& f, double epsilon, const ContainmentSpec& containment,
                        const HamiltonianSpec& h, const DomainGrid& grid);
DaggerPair build_ddagger(const SmoothTestFunction& f, double epsilon, const ContainmentSpec& containment,
                         const HamiltonianSpec& h, const DomainGrid& grid);

struct AlmostOptimizer {
  std::size_t node = 0;
  /// sup(phi - f) - (phi - f)(node) for dagger pairs; mirrored for ddagger.
  double gap = 0.0;
  /// Sublevel bound M: f(node) <= M (dagger) or -f(node) <= M (ddagger).
  double sublevel_bound = 0.0;
};

/// First node (index order) within 1/n of the optimum of phi - f (max for
/// dagger, min for ddagger); n = nullopt asks for the exact optimiser.
AlmostOptimizer almost_optimizer(std::span<const double> phi, const DaggerPair& pair,
                                 std::optional<std::size_t> n = std::nullopt);

struct TestPairSpec {
  SmoothTestFunction f;
  double epsilon;
};

struct FamilyOptions {
  std::size_t centers = 5;
  std::vector<double> curvatures{0.5, 2.0};
  std::vector<double> epsilons{0.05, 0.2};
  /// Bump radius as a fraction of the smallest domain extent.
  double radius_fraction = 0.25;
  double offset = 0.0;
};

/// Bumps centred on grid nodes spread along the main diagonal, crossed
/// with the curvatures and epsilons (20 pairs with the defaults).
std::vector<TestPairSpec> bump_test_family(const DomainGrid& grid, const FamilyOptions& options = {});

/// g(t) = alpha t + beta t^2
struct TimeTest {
  double alpha = 0.0;
  double beta = 0.0;
  double operator()(double t) const { return alpha * t + beta * t * t; }
  double derivative(double t) const { return alpha + 2.0 * beta * t; }
};

struct AlmostOptimizerStep {
  std::size_t n;
  std::size_t node;
  double gap;
};

struct CertificateEntry {
  PairKind kind;
  double epsilon;
  Point center;
  double curvature;
  std::size_t x0;
  std::optional<double> t0;
  std::optional<TimeTest> time_test;
  double residual;
  double tol;
  bool pass;
  /// "interior", or "initial" when the t = 0 branch decided the verdict.
  std::string branch;
  double sublevel_bound;
  std::vector<AlmostOptimizerStep> trace;
};

struct CertificateReport {
  std::vector<CertificateEntry> entries;
  bool aggregate_pass = true;
  std::size_t failures = 0;
  double tol = 0.0;
  int radius = 1;
};

/// Discrete viscosity certificate for the stationary equations: at the
/// exact optimiser x0 of usc(R) - f_dagger, residual usc(R)(x0) - lambda g(x0) - h(x0)
/// must be <= tol; at the optimiser of lsc(R) - f_ddagger the same residual
/// with lsc must be >= -tol. Throws ConfigError for an empty family.
CertificateReport certify_stationary(const DomainGrid& grid, std::span<const double> values,
                                     const HamiltonianSpec& h, const ContainmentSpec& containment, double lambda,
                                     const ScalarFn& payoff, const std::vector<TestPairSpec>& family, double tol,
                                     int radius = 1);

/// Space-time certificate for the evolutionary equations with the t = 0
/// branch (min with usc(v) - u0 for subsolutions, max with lsc(v) - u0
/// for supersolutions).
CertificateReport certify_evolutionary(const TimeValueField& field, const HamiltonianSpec& h,
                                       const ContainmentSpec& containment, const ScalarFn& initial,
                                       const std::vector<TestPairSpec>& family,
                                       const std::vector<TimeTest>& time_tests, double tol, int radius = 1);

/// Largest H(x, d f_dagger(x)) - g_dagger(x) over nodes (<= 0 for convex H),
/// or for ddagger pairs the largest g_ddagger(x) - H(x, d f_ddagger(x)).
double envelope_violation(const DaggerPair& pair, const HamiltonianSpec& h, const DomainGrid& grid);

}  // namespace hjcert
