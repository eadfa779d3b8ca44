#include "hjcert/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjcert/errors.hpp"
#include "hjcert/parallel.hpp"

namespace hjcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string to_string(PairKind k) { return k == PairKind::dagger ? "dagger" : "ddagger"; }

DaggerPair::DaggerPair(PairKind kind, SmoothTestFunction base, double epsilon, ContainmentSpec containment,
                       HamiltonianSpec hamiltonian)
    : kind_(kind),
      base_(std::move(base)),
      epsilon_(epsilon),
      containment_(std::move(containment)),
      hamiltonian_(std::move(hamiltonian)) {}

double DaggerPair::f(const Point& x) const {
  return kind_ == PairKind::dagger ? (1.0 - epsilon_) * base_(x) + epsilon_ * containment_(x)
                                   : (1.0 + epsilon_) * base_(x) - epsilon_ * containment_(x);
}

double DaggerPair::g(const Point& x) const {
  const double hx = hamiltonian_(x, base_.differential(x));
  return kind_ == PairKind::dagger ? (1.0 - epsilon_) * hx + epsilon_ * containment_.constant()
                                   : (1.0 + epsilon_) * hx - epsilon_ * containment_.constant();
}

Covector DaggerPair::df(const Point& x) const {
  const Covector a = base_.differential(x);
  const Covector b = containment_.differential(x);
  Covector out(a.size());
  const double s = kind_ == PairKind::dagger ? 1.0 - epsilon_ : 1.0 + epsilon_;
  const double t = kind_ == PairKind::dagger ? epsilon_ : -epsilon_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i] + t * b[i];
  return out;
}

DaggerPair build_pair(PairKind kind, const SmoothTestFunction& f, double epsilon, const ContainmentSpec& containment,
                      const HamiltonianSpec& h, const DomainGrid& grid) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (kind == PairKind::dagger && !f.lower_bounded()) {
    throw PreconditionError("dagger pairs need a lower-bounded test function");
  }
  if (kind == PairKind::ddagger && !f.upper_bounded()) {
    throw PreconditionError("ddagger pairs need an upper-bounded test function");
  }
  DaggerPair pair(kind, f, epsilon, containment, h);
  pair.f_nodes_.resize(grid.size());
  pair.g_nodes_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    pair.f_nodes_[i] = pair.f(x);
    pair.g_nodes_[i] = pair.g(x);
  }
  return pair;
}

DaggerPair build_dagger(const SmoothTestFunction& f, double epsilon, const ContainmentSpec& containment,
                        const HamiltonianSpec& h, const DomainGrid& grid) {
  return build_pair(PairKind::dagger, f, epsilon, containment, h, grid);
}

DaggerPair build_ddagger(const SmoothTestFunction& f, double epsilon, const ContainmentSpec& containment,
                         const HamiltonianSpec& h, const DomainGrid& grid) {
  return build_pair(PairKind::ddagger, f, epsilon, containment, h, grid);
}

AlmostOptimizer almost_optimizer(std::span<const double> phi, const DaggerPair& pair, std::optional<std::size_t> n) {
  const auto fn = pair.f_nodes();
  // Work with the maximisation form: dagger maximises phi - f, ddagger
  // maximises (-phi) - (-f).
  const double sign = pair.kind() == PairKind::dagger ? 1.0 : -1.0;
  double best = -kInf;
  double phi_sup = 0.0;
  double f_min = kInf;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    best = std::max(best, sign * (phi[i] - fn[i]));
    phi_sup = std::max(phi_sup, std::abs(phi[i]));
    f_min = std::min(f_min, sign * fn[i]);
  }
  const double slack = n ? 1.0 / static_cast<double>(*n) : 0.0;
  AlmostOptimizer out;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double val = sign * (phi[i] - fn[i]);
    if (val >= best - slack) {
      out.node = i;
      out.gap = best - val;
      break;
    }
  }
  // f(x_n) <= phi(x_n) - phi(x~) + f(x~) + 1/n <= 2|phi| + f(x~) + 1/n
  // with x~ the minimiser of f.
  out.sublevel_bound = 2.0 * phi_sup + f_min + slack;
  return out;
}

std::vector<TestPairSpec> bump_test_family(const DomainGrid& grid, const FamilyOptions& options) {
  double extent = kInf;
  for (std::size_t a = 0; a < grid.dimension(); ++a) extent = std::min(extent, grid.upper()[a] - grid.lower()[a]);
  const double radius = options.radius_fraction * extent;
  std::vector<TestPairSpec> family;
  for (std::size_t c = 0; c < options.centers; ++c) {
    Point center(grid.dimension());
    const double frac = static_cast<double>(c + 1) / static_cast<double>(options.centers + 1);
    for (std::size_t a = 0; a < center.size(); ++a) {
      center[a] = grid.lower()[a] + frac * (grid.upper()[a] - grid.lower()[a]);
    }
    center = grid.point(grid.nearest_index(center));
    for (double b : options.curvatures) {
      for (double eps : options.epsilons) {
        family.push_back({SmoothTestFunction::bump(grid.geometry(), center, b, radius, options.offset), eps});
      }
    }
  }
  return family;
}

namespace {

CertificateEntry make_entry(const DaggerPair& pair, const TestPairSpec& spec, std::size_t x0, double residual,
                            double tol) {
  CertificateEntry e{pair.kind(),
                     pair.epsilon(),
                     spec.f.params().center,
                     spec.f.params().curvature,
                     x0,
                     std::nullopt,
                     std::nullopt,
                     residual,
                     tol,
                     pair.kind() == PairKind::dagger ? residual <= tol : residual >= -tol,
                     "interior",
                     0.0,
                     {}};
  return e;
}

void finalize(CertificateReport& report) {
  report.failures = 0;
  for (const auto& e : report.entries) report.failures += e.pass ? 0 : 1;
  report.aggregate_pass = report.failures == 0;
}

}  // namespace

CertificateReport certify_stationary(const DomainGrid& grid, std::span<const double> values,
                                     const HamiltonianSpec& h, const ContainmentSpec& containment, double lambda,
                                     const ScalarFn& payoff, const std::vector<TestPairSpec>& family, double tol,
                                     int radius) {
  if (family.empty()) throw ConfigError("certification needs a nonempty test family");
  if (values.size() != grid.size()) throw PreconditionError("value field does not match the grid");
  const std::vector<double> upper = usc_regularize(grid, values, radius);
  const std::vector<double> lower = lsc_regularize(grid, values, radius);

  std::vector<CertificateEntry> entries(2 * family.size());
  parallel_for(family.size(), [&](std::size_t k) {
    const TestPairSpec& spec = family[k];
    for (PairKind kind : {PairKind::dagger, PairKind::ddagger}) {
      const DaggerPair pair = build_pair(kind, spec.f, spec.epsilon, containment, h, grid);
      const std::vector<double>& field = kind == PairKind::dagger ? upper : lower;
      const AlmostOptimizer opt = almost_optimizer(field, pair);
      const Point x0 = grid.point(opt.node);
      const double residual = field[opt.node] - lambda * pair.g_nodes()[opt.node] - payoff(x0);
      CertificateEntry e = make_entry(pair, spec, opt.node, residual, tol);
      e.sublevel_bound = opt.sublevel_bound;
      for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
        const AlmostOptimizer step = almost_optimizer(values, pair, n);
        e.trace.push_back({n, step.node, step.gap});
      }
      entries[2 * k + (kind == PairKind::dagger ? 0 : 1)] = std::move(e);
    }
  });
  CertificateReport report{std::move(entries), true, 0, tol, radius};
  finalize(report);
  return report;
}

CertificateReport certify_evolutionary(const TimeValueField& field, const HamiltonianSpec& h,
                                       const ContainmentSpec& containment, const ScalarFn& initial,
                                       const std::vector<TestPairSpec>& family,
                                       const std::vector<TimeTest>& time_tests, double tol, int radius) {
  if (family.empty() || time_tests.empty()) throw ConfigError("certification needs a nonempty test family");
  const DomainGrid& grid = field.grid;
  const auto upper = usc_regularize(grid, field.layers, radius);
  const auto lower = lsc_regularize(grid, field.layers, radius);
  const std::vector<double> u0 = grid.sample(initial);
  const double lambda = field.lambda;
  const std::size_t layers = field.layers.size();

  const std::size_t per_pair = 2 * time_tests.size();
  std::vector<CertificateEntry> entries(family.size() * per_pair);
  parallel_for(family.size(), [&](std::size_t k) {
    const TestPairSpec& spec = family[k];
    for (PairKind kind : {PairKind::dagger, PairKind::ddagger}) {
      const DaggerPair pair = build_pair(kind, spec.f, spec.epsilon, containment, h, grid);
      const auto& env = kind == PairKind::dagger ? upper : lower;
      const double sign = kind == PairKind::dagger ? 1.0 : -1.0;
      for (std::size_t q = 0; q < time_tests.size(); ++q) {
        const TimeTest& g = time_tests[q];
        double best = -kInf;
        std::size_t best_node = 0;
        std::size_t best_layer = 0;
        for (std::size_t l = 0; l < layers; ++l) {
          const double gt = g(field.times[l]);
          for (std::size_t i = 0; i < grid.size(); ++i) {
            const double val = sign * (env[l][i] - pair.f_nodes()[i] - gt);
            if (val > best) {
              best = val;
              best_node = i;
              best_layer = l;
            }
          }
        }
        const double t0 = field.times[best_layer];
        const double u = env[best_layer][best_node];
        double residual = g.derivative(t0) + lambda * u - pair.g_nodes()[best_node];
        std::string branch = "interior";
        if (best_layer == 0) {
          const double initial_gap = u - u0[best_node];
          const bool use_initial = kind == PairKind::dagger ? initial_gap < residual : initial_gap > residual;
          if (use_initial) {
            residual = initial_gap;
            branch = "initial";
          }
        }
        CertificateEntry e = make_entry(pair, spec, best_node, residual, tol);
        e.t0 = t0;
        e.time_test = g;
        e.branch = branch;
        e.sublevel_bound = almost_optimizer(env[best_layer], pair).sublevel_bound;
        entries[k * per_pair + (kind == PairKind::dagger ? 0 : time_tests.size()) + q] = std::move(e);
      }
    }
  });
  CertificateReport report{std::move(entries), true, 0, tol, radius};
  finalize(report);
  return report;
}

double envelope_violation(const DaggerPair& pair, const HamiltonianSpec& h, const DomainGrid& grid) {
  double worst = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double hv = h(x, pair.df(x));
    const double gv = pair.g_nodes()[i];
    worst = std::max(worst, pair.kind() == PairKind::dagger ? hv - gv : gv - hv);
  }
  return worst;
}

}  // namespace hjcert
