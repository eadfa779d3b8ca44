#pragma once

#include <limits>
#include <span>
#include <vector>

#include "hjcert/hamiltonian.hpp"
#include "hjcert/test_function.hpp"

namespace hjcert {

struct ConjugateOptions {
  /// p-grid spacing per axis; 0 selects p_max / 200 on each axis. The grid
  /// is anchored at p = 0, so for a fixed spacing a larger search box gives
  /// a superset of candidates.
  double dp = 0.0;
  /// Ignore an analytic conjugate and always search the p-grid.
  bool force_numeric = false;
  /// One golden-section coordinate pass around the best grid point.
  bool refine = true;
};

/// Deficit allowed on the grid path when checking Fenchel-Young.
inline constexpr double kGridConjugateTolerance = 1e-3;
inline constexpr double kAnalyticConjugateTolerance = 1e-9;

struct LagrangianValue {
  /// Finite, or +infinity.
  double value = 0.0;
  /// Maximising p; empty when value is infinite.
  Covector argmax_p;
  /// The grid maximiser sits on the p-box boundary: value is only a lower
  /// bound of the true conjugate (possibly +infinity).
  bool saturated = false;
  bool analytic = false;

  bool infinite() const { return value == std::numeric_limits<double>::infinity(); }
};

/// L(x,v) = sup_p <p,v> - H(x,p). Uses the analytic conjugate when present
/// (the maximiser is still located on the p-grid); otherwise the grid
/// search. Throws EvaluationError on non-finite H in the search box.
LagrangianValue conjugate(const HamiltonianSpec& h, const Point& x, const Vector& v,
                          const ConjugateOptions& options = {});

/// Value-only conjugate used on hot paths: analytic when available,
/// otherwise the grid search value (without the argmax bookkeeping).
double lagrangian(const HamiltonianSpec& h, const Point& x, const Vector& v, const ConjugateOptions& options = {});

/// Tolerance that applies to conjugate values of `h` under `options`.
double conjugate_tolerance(const HamiltonianSpec& h, const ConjugateOptions& options = {});

/// L(x,v) + H(x,p) - <p,v>; +infinity when L is.
double fenchel_young_gap(const HamiltonianSpec& h, const Point& x, const Vector& v, const Covector& p,
                         const ConjugateOptions& options = {});

/// sup over x in K and |p| <= c of H(x,p), scanned on a p-grid of
/// `resolution` cells per half-axis with outer points projected onto the
/// sphere |p| = c. Throws PreconditionError when K is empty or c <= 0.
double h_bar(const HamiltonianSpec& h, std::span<const Point> compact, double c, int resolution = 100);

struct PsiOptions {
  double s_min = 1e-2;
  double s_max = 10.0;
  std::size_t table_size = 400;
  /// Truncation of the |v| >= s infimum; 0 means s_max.
  double v_max = 0.0;
  /// Directions sampled on the unit sphere for d = 2 (d = 1 uses +-1).
  std::size_t directions_2d = 72;
  ConjugateOptions conjugate;
};

/// Sublinear dominating function r -> C * phi^{-1}(r), where
/// phi(s) = s * inf_{x in K} inf_{s <= |v| <= v_max} L(x,v)/|v| is
/// tabulated on a log grid and inverted by monotone linear interpolation.
class PsiFunction {
 public:
  PsiFunction(std::vector<double> s, std::vector<double> phi, double c, double v_max);

  /// Clamped to C * s_0 below the first knot, linearly extrapolated from
  /// the last two knots above the last one.
  double operator()(double r) const;
  double psi_over_r(double r) const { return (*this)(r) / r; }

  double constant() const { return constant_; }
  double v_max() const { return v_max_; }
  const std::vector<double>& s_table() const { return s_; }
  const std::vector<double>& phi_table() const { return phi_; }
  /// Knots r_i = phi(s_i).
  const std::vector<double>& r_table() const { return phi_; }
  std::vector<double> psi_table() const;

 private:
  std::vector<double> s_;
  std::vector<double> phi_;
  double constant_;
  double v_max_;
};

/// Throws ConstructionError naming the band when phi fails to increase
/// strictly (e.g. L vanishes on a whole band of speeds).
PsiFunction build_psi(const HamiltonianSpec& h, const SmoothTestFunction& f, std::span<const Point> compact,
                      const PsiOptions& options = {});

}  // namespace hjcert
