#include "hjcert/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hjcert/errors.hpp"
#include "hjcert/parallel.hpp"

namespace hjcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridSearch {
  double value = -kInf;
  Covector argmax;
  bool saturated = false;
};

std::vector<double> axis_spacing(const HamiltonianSpec& h, const ConjugateOptions& o) {
  std::vector<double> dp(h.dimension());
  for (std::size_t a = 0; a < dp.size(); ++a) dp[a] = o.dp > 0.0 ? o.dp : h.p_max()[a] / 200.0;
  return dp;
}

GridSearch search_p_grid(const HamiltonianSpec& h, const Point& x, const Vector& v, const ConjugateOptions& o) {
  const std::size_t d = h.dimension();
  const std::vector<double> dp = axis_spacing(h, o);
  std::vector<long long> half(d);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    half[a] = static_cast<long long>(std::floor(h.p_max()[a] / dp[a] + 1e-9));
    total *= static_cast<std::size_t>(2 * half[a] + 1);
  }
  auto objective = [&](const Covector& p) {
    const double hv = h(x, p);
    if (!std::isfinite(hv)) throw EvaluationError("non-finite H value in the p-search box");
    return dot(p, v) - hv;
  };

  GridSearch best;
  std::vector<long long> best_k(d);
  Covector p(d);
  std::vector<long long> k(d);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    for (std::size_t a = 0; a < d; ++a) {
      const auto width = static_cast<std::size_t>(2 * half[a] + 1);
      k[a] = static_cast<long long>(rest % width) - half[a];
      rest /= width;
      p[a] = static_cast<double>(k[a]) * dp[a];
    }
    const double val = objective(p);
    if (val > best.value) {
      best.value = val;
      best.argmax = p;
      best_k = k;
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    if (std::llabs(best_k[a]) == half[a]) best.saturated = true;
  }

  if (o.refine) {
    constexpr double kGolden = 0.6180339887498949;
    Covector q = best.argmax;
    for (std::size_t a = 0; a < d; ++a) {
      const double lim = static_cast<double>(half[a]) * dp[a];
      double lo = std::max(-lim, q[a] - dp[a]);
      double hi = std::min(lim, q[a] + dp[a]);
      auto along = [&](double t) {
        Covector r = q;
        r[a] = t;
        return objective(r);
      };
      double m1 = hi - kGolden * (hi - lo);
      double m2 = lo + kGolden * (hi - lo);
      double f1 = along(m1);
      double f2 = along(m2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          lo = m1;
          m1 = m2;
          f1 = f2;
          m2 = lo + kGolden * (hi - lo);
          f2 = along(m2);
        } else {
          hi = m2;
          m2 = m1;
          f2 = f1;
          m1 = hi - kGolden * (hi - lo);
          f1 = along(m1);
        }
      }
      const double t = f1 >= f2 ? m1 : m2;
      const double ft = std::max(f1, f2);
      if (ft > best.value) {
        q[a] = t;
        best.value = ft;
        best.argmax = q;
      }
    }
  }
  return best;
}

}  // namespace

LagrangianValue conjugate(const HamiltonianSpec& h, const Point& x, const Vector& v, const ConjugateOptions& options) {
  LagrangianValue out;
  if (h.has_conjugate() && !options.force_numeric) {
    out.analytic = true;
    out.value = (*h.conjugate())(x, v);
    if (std::isnan(out.value)) throw EvaluationError("analytic conjugate returned NaN");
    if (!out.infinite()) out.argmax_p = search_p_grid(h, x, v, options).argmax;
    return out;
  }
  GridSearch g = search_p_grid(h, x, v, options);
  out.value = g.value;
  out.argmax_p = std::move(g.argmax);
  out.saturated = g.saturated;
  return out;
}

double lagrangian(const HamiltonianSpec& h, const Point& x, const Vector& v, const ConjugateOptions& options) {
  if (h.has_conjugate() && !options.force_numeric) {
    const double val = (*h.conjugate())(x, v);
    if (std::isnan(val)) throw EvaluationError("analytic conjugate returned NaN");
    return val;
  }
  return search_p_grid(h, x, v, options).value;
}

double conjugate_tolerance(const HamiltonianSpec& h, const ConjugateOptions& options) {
  return h.has_conjugate() && !options.force_numeric ? kAnalyticConjugateTolerance : kGridConjugateTolerance;
}

double fenchel_young_gap(const HamiltonianSpec& h, const Point& x, const Vector& v, const Covector& p,
                         const ConjugateOptions& options) {
  const double l = lagrangian(h, x, v, options);
  if (l == kInf) return kInf;
  return l + h(x, p) - dot(p, v);
}

double h_bar(const HamiltonianSpec& h, std::span<const Point> compact, double c, int resolution) {
  if (compact.empty()) throw PreconditionError("h_bar needs a nonempty compact set");
  if (!(c > 0.0)) throw PreconditionError("h_bar needs a positive radius");
  if (resolution < 1) throw PreconditionError("h_bar resolution must be positive");
  const std::size_t d = compact.front().size();
  const auto width = static_cast<std::size_t>(2 * resolution + 1);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= width;
  double sup = -kInf;
  Covector p(d);
  for (const Point& x : compact) {
    for (std::size_t cidx = 0; cidx < total; ++cidx) {
      std::size_t rest = cidx;
      for (std::size_t a = 0; a < d; ++a) {
        p[a] = c * (static_cast<double>(rest % width) - resolution) / resolution;
        rest /= width;
      }
      const double r = norm(p);
      if (r > c) {
        for (double& pa : p) pa *= c / r;
      }
      const double val = h(x, p);
      if (!std::isfinite(val)) throw EvaluationError("non-finite H value in h_bar scan");
      sup = std::max(sup, val);
    }
  }
  return sup;
}

PsiFunction::PsiFunction(std::vector<double> s, std::vector<double> phi, double c, double v_max)
    : s_(std::move(s)), phi_(std::move(phi)), constant_(c), v_max_(v_max) {}

double PsiFunction::operator()(double r) const {
  if (r <= phi_.front()) return constant_ * s_.front();
  const std::size_t n = phi_.size();
  std::size_t hi;
  if (r >= phi_.back()) {
    hi = n - 1;
  } else {
    hi = static_cast<std::size_t>(std::upper_bound(phi_.begin(), phi_.end(), r) - phi_.begin());
  }
  const std::size_t lo = hi - 1;
  const double t = (r - phi_[lo]) / (phi_[hi] - phi_[lo]);
  return constant_ * (s_[lo] + t * (s_[hi] - s_[lo]));
}

std::vector<double> PsiFunction::psi_table() const {
  std::vector<double> out(s_.size());
  for (std::size_t i = 0; i < s_.size(); ++i) out[i] = constant_ * s_[i];
  return out;
}

PsiFunction build_psi(const HamiltonianSpec& h, const SmoothTestFunction& f, std::span<const Point> compact,
                      const PsiOptions& options) {
  if (compact.empty()) throw PreconditionError("build_psi needs a nonempty compact set");
  if (!(options.s_min > 0.0) || !(options.s_max > options.s_min) || options.table_size < 2) {
    throw PreconditionError("build_psi needs 0 < s_min < s_max and at least two knots");
  }
  const double v_max = options.v_max > 0.0 ? options.v_max : options.s_max;
  const std::size_t d = compact.front().size();

  double c = 0.0;
  for (const Point& x : compact) c = std::max(c, norm(f.differential(x)));
  if (!std::isfinite(c)) throw PreconditionError("test function differential is unbounded on K");

  std::vector<Vector> directions;
  if (d == 1) {
    directions = {{1.0}, {-1.0}};
  } else if (d == 2) {
    for (std::size_t k = 0; k < options.directions_2d; ++k) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(options.directions_2d);
      directions.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    for (std::size_t a = 0; a < d; ++a) {
      for (double sgn : {-1.0, 1.0}) {
        Vector e(d, 0.0);
        e[a] = sgn;
        directions.push_back(e);
      }
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Vector e(d);
      for (std::size_t a = 0; a < d; ++a) e[a] = ((mask >> a) & 1u) ? 1.0 : -1.0;
      directions.push_back(scaled(e, 1.0 / std::sqrt(static_cast<double>(d))));
    }
  }

  std::vector<double> s(options.table_size);
  const double log_lo = std::log(options.s_min);
  const double log_hi = std::log(options.s_max);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(s.size() - 1));
  }
  s.back() = options.s_max;
  // The infimum over |v| >= s is truncated at v_max: drop knots beyond it.
  while (!s.empty() && s.back() > v_max) s.pop_back();
  if (s.size() < 2) throw PreconditionError("build_psi: v_max leaves fewer than two knots");
  const std::size_t n = s.size();

  std::vector<double> ratio(n, kInf);
  parallel_for(n, [&](std::size_t j) {
    double m = kInf;
    for (const Point& x : compact) {
      for (const Vector& e : directions) {
        const double l = lagrangian(h, x, scaled(e, s[j]), options.conjugate);
        m = std::min(m, l / s[j]);
      }
    }
    ratio[j] = m;
  });

  // phi(s_i) = s_i * min_{j >= i, s_j <= v_max} ratio_j
  std::vector<double> phi(n);
  double suffix = kInf;
  for (std::size_t i = n; i-- > 0;) {
    suffix = std::min(suffix, ratio[i]);
    phi[i] = s[i] * suffix;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!std::isfinite(phi[i + 1]) || !(phi[i + 1] > phi[i])) {
      std::ostringstream msg;
      msg << "phi is not strictly increasing on the band [" << s[i] << ", " << s[i + 1]
          << "]: the conjugate is degenerate (flat) there";
      throw ConstructionError(msg.str());
    }
  }
  return PsiFunction(std::move(s), std::move(phi), c, v_max);
}

}  // namespace hjcert
