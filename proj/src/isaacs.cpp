#include "hjcert/isaacs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjcert/errors.hpp"
#include "hjcert/parallel.hpp"

namespace hjcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shape(const IsaacsSpec& spec) {
  if (spec.theta1.empty() || spec.theta2.empty()) throw PreconditionError("strategy sets must be nonempty");
  if (spec.inner.size() != spec.theta1.size()) throw PreconditionError("inner family has wrong row count");
  for (const auto& row : spec.inner) {
    if (row.size() != spec.theta2.size()) throw PreconditionError("inner family has wrong column count");
  }
  if (!spec.cost) throw PreconditionError("game needs a cost function");
}

double max_inner(const IsaacsSpec& spec, const Point& x, const Covector& p) {
  double best = -kInf;
  for (const auto& row : spec.inner) {
    for (const auto& h : row) best = std::max(best, h(x, p));
  }
  return best;
}

bool singleton(const IsaacsSpec& spec) { return spec.theta1.size() == 1 && spec.theta2.size() == 1; }

// Probe momenta for the shared-gradient check: zero, the axes at unit
// scale, and the test function's differential.
bool shared_gradients(const IsaacsSpec& spec, const DomainGrid& grid, const SmoothTestFunction* f) {
  for (const auto& row : spec.inner) {
    for (const auto& h : row) {
      if (!h.has_p_gradient()) return false;
    }
  }
  const std::size_t d = grid.dimension();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point x = grid.point(n);
    std::vector<Covector> probes;
    probes.emplace_back(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      Covector e(d, 0.0);
      e[a] = 1.0;
      probes.push_back(e);
    }
    if (f) probes.push_back(f->differential(x));
    for (const auto& p : probes) {
      const Vector ref = spec.inner[0][0].p_gradient(x, p);
      for (const auto& row : spec.inner) {
        for (const auto& h : row) {
          if (max_abs(difference(h.p_gradient(x, p), ref)) > 1e-12) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

IsaacsValue h_upper(const IsaacsSpec& spec, const Point& x, const Covector& p) {
  IsaacsValue out{-kInf, 0, 0};
  for (std::size_t i = 0; i < spec.theta1.size(); ++i) {
    double inner = kInf;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < spec.theta2.size(); ++j) {
      const double v = spec.composite_term(x, p, i, j);
      if (v < inner) {
        inner = v;
        arg = j;
      }
    }
    if (inner > out.value) out = {inner, i, arg};
  }
  return out;
}

IsaacsValue h_lower(const IsaacsSpec& spec, const Point& x, const Covector& p) {
  IsaacsValue out{kInf, 0, 0};
  for (std::size_t j = 0; j < spec.theta2.size(); ++j) {
    double inner = -kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < spec.theta1.size(); ++i) {
      const double v = spec.composite_term(x, p, i, j);
      if (v > inner) {
        inner = v;
        arg = i;
      }
    }
    if (inner < out.value) out = {inner, arg, j};
  }
  return out;
}

IsaacsValidity validate_isaacs(const IsaacsSpec& spec, const DomainGrid& grid,
                               const std::optional<ContainmentSpec>& containment) {
  IsaacsValidity out;
  try {
    require_shape(spec);
  } catch (const Error& e) {
    out.shape_ok = false;
    out.messages.emplace_back(e.what());
    return out;
  }
  const Covector zero(grid.dimension(), 0.0);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point x = grid.point(n);
    const Covector du = containment ? containment->differential(x) : zero;
    for (std::size_t i = 0; i < spec.theta1.size(); ++i) {
      for (std::size_t j = 0; j < spec.theta2.size(); ++j) {
        std::ostringstream where;
        where << " at node " << n << ", pair (" << i << ", " << j << ")";
        const double c = spec.cost(x, spec.theta1[i], spec.theta2[j]);
        if (out.cost_nonneg && !(c >= 0.0)) {
          out.cost_nonneg = false;
          out.messages.push_back("negative cost" + where.str());
        }
        const double h0 = spec.inner[i][j](x, zero);
        if (out.zero_at_origin && !(std::abs(h0) <= kZeroMomentumTolerance)) {
          out.zero_at_origin = false;
          out.messages.push_back("inner H(x,0) != 0" + where.str());
        }
        if (containment && out.uniform_containment && !(spec.inner[i][j](x, du) <= containment->constant())) {
          out.uniform_containment = false;
          out.messages.push_back("containment bound exceeded" + where.str());
        }
      }
    }
  }
  return out;
}

IsaacsGapReport isaacs_gap(const IsaacsSpec& spec, const DomainGrid& grid, const std::vector<Covector>& p_samples,
                           double tol) {
  if (p_samples.empty()) throw PreconditionError("isaacs_gap needs at least one momentum sample");
  require_shape(spec);
  IsaacsGapReport out;
  out.tol = tol;
  out.gap.assign(grid.size(), -kInf);
  std::vector<double> lows(grid.size(), kInf);
  parallel_for(grid.size(), [&](std::size_t n) {
    const Point x = grid.point(n);
    for (const auto& p : p_samples) {
      const double g = h_lower(spec, x, p).value - h_upper(spec, x, p).value;
      out.gap[n] = std::max(out.gap[n], g);
      lows[n] = std::min(lows[n], g);
    }
  });
  out.max_gap = *std::max_element(out.gap.begin(), out.gap.end());
  out.min_gap = *std::min_element(lows.begin(), lows.end());
  out.samples = grid.size() * p_samples.size();
  out.holds = out.max_gap <= tol;
  return out;
}

HamiltonianSpec isaacs_hamiltonian(const IsaacsSpec& spec, const DomainGrid& grid) {
  const IsaacsValidity validity = validate_isaacs(spec, grid);
  if (!validity.valid()) {
    throw PreconditionError("invalid game: " + (validity.messages.empty() ? std::string("?") : validity.messages[0]));
  }
  HamiltonianParts parts;
  parts.evaluate = [spec](const Point& x, const Covector& p) { return h_upper(spec, x, p).value; };
  // sup of convex functions stays convex; an inf over more than one
  // strategy generally does not.
  parts.convex_in_p = spec.theta2.size() == 1;
  if (singleton(spec) && spec.inner[0][0].has_conjugate()) {
    parts.conjugate = [spec](const Point& x, const Vector& v) {
      return (*spec.inner[0][0].conjugate())(x, v) + spec.cost(x, spec.theta1[0], spec.theta2[0]);
    };
  }
  if (shared_gradients(spec, grid, nullptr)) {
    parts.p_gradient = [spec](const Point& x, const Covector& p) { return spec.inner[0][0].p_gradient(x, p); };
  }
  parts.p_max = spec.inner[0][0].p_max();
  parts.variant = HamiltonianVariant::isaacs_composite;
  parts.containment_envelope = [spec](const Point& x, const Covector& p) { return max_inner(spec, x, p); };
  parts.description = spec.description;
  return HamiltonianSpec(std::move(parts), grid);
}

ContainmentSpec isaacs_containment(const IsaacsSpec& spec, const DomainGrid& grid) {
  require_shape(spec);
  HamiltonianParts parts;
  parts.evaluate = [spec](const Point& x, const Covector& p) { return max_inner(spec, x, p); };
  parts.p_max = spec.inner[0][0].p_max();
  parts.variant = HamiltonianVariant::isaacs_composite;
  parts.description = spec.description + " inner envelope";
  return standard_containment(grid, HamiltonianSpec(std::move(parts), grid));
}

IsaacsEnvelopeReport isaacs_envelope_check(const IsaacsSpec& spec, const SmoothTestFunction& f, double epsilon,
                                           const ContainmentSpec& containment, const DomainGrid& grid) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  require_shape(spec);
  IsaacsEnvelopeReport out;
  out.residual.resize(grid.size());
  std::vector<char> gap_ok(grid.size(), 1);
  const double c = containment.constant();
  parallel_for(grid.size(), [&](std::size_t n) {
    const Point x = grid.point(n);
    const Covector df = f.differential(x);
    const Covector du = containment.differential(x);
    Covector mixed(df.size());
    for (std::size_t a = 0; a < df.size(); ++a) mixed[a] = (1.0 - epsilon) * df[a] + epsilon * du[a];
    const double up_df = h_upper(spec, x, df).value;
    const double up_mixed = h_upper(spec, x, mixed).value;
    out.residual[n] = up_mixed - ((1.0 - epsilon) * up_df + epsilon * c);
    const bool ok = h_lower(spec, x, df).value - up_df <= kIsaacsTolerance &&
                    h_lower(spec, x, mixed).value - up_mixed <= kIsaacsTolerance;
    gap_ok[n] = ok ? 1 : 0;
  });
  out.max_residual = *std::max_element(out.residual.begin(), out.residual.end());
  out.condition_holds = std::all_of(gap_ok.begin(), gap_ok.end(), [](char c) { return c != 0; });
  return out;
}

IsaacsInclusion isaacs_diff_inclusion(const IsaacsSpec& spec, const SmoothTestFunction& f, const DomainGrid& grid,
                                      const Point& x0, double horizon, double step,
                                      const InclusionOptions& options) {
  require_shape(spec);
  if (!shared_gradients(spec, grid, &f)) {
    throw CapabilityError("inner Hamiltonians do not share one p-gradient; a single curve cannot serve every pair");
  }
  InclusionPath path = diff_inclusion_path(spec.inner[0][0], f, grid.geometry(), x0, horizon, step, options);
  IsaacsInclusion out{std::move(path.curve), {}, 0.0};
  for (const auto& row : spec.inner) {
    for (const auto& h : row) {
      const double r = young_residual(h, f, out.curve, horizon, options.conjugate);
      out.pair_residuals.push_back(r);
      out.worst_residual = std::max(out.worst_residual, std::abs(r));
    }
  }
  return out;
}

IsaacsSpec separable_quadratic_game(const DomainGrid& grid, std::vector<Strategy> theta1,
                                    std::vector<Strategy> theta2, double p_max) {
  const std::size_t d = grid.dimension();
  for (const auto* set : {&theta1, &theta2}) {
    if (set->empty()) throw ConfigError("strategy sets must be nonempty");
    for (const auto& s : *set) {
      if (s.size() != d + 1) throw ConfigError("separable strategies need d drift entries and one cost entry");
    }
  }
  IsaacsSpec spec;
  for (const auto& a : theta1) {
    std::vector<HamiltonianSpec> row;
    for (const auto& b : theta2) {
      AffineDrift drift;
      drift.offset = Vector(d);
      for (std::size_t k = 0; k < d; ++k) drift.offset[k] = a[k] + b[k];
      row.push_back(transport_quadratic_hamiltonian(grid, drift, p_max));
    }
    spec.inner.push_back(std::move(row));
  }
  spec.theta1 = std::move(theta1);
  spec.theta2 = std::move(theta2);
  spec.cost = [](const Point&, const Strategy& a, const Strategy& b) { return a.back() + b.back(); };
  spec.separable = true;
  spec.description = "separable quadratic game";
  return spec;
}

namespace {

IsaacsSpec quadratic_inner_game(const DomainGrid& grid, std::vector<Strategy> theta1, std::vector<Strategy> theta2,
                                double p_max) {
  if (theta1.empty() || theta2.empty()) throw ConfigError("strategy sets must be nonempty");
  for (const auto* set : {&theta1, &theta2}) {
    for (const auto& s : *set) {
      if (s.empty()) throw ConfigError("strategies must have at least one entry");
    }
  }
  IsaacsSpec spec;
  const HamiltonianSpec q = quadratic_hamiltonian(grid, 1.0, p_max);
  spec.inner.assign(theta1.size(), std::vector<HamiltonianSpec>(theta2.size(), q));
  spec.theta1 = std::move(theta1);
  spec.theta2 = std::move(theta2);
  return spec;
}

}  // namespace

IsaacsSpec coupled_cost_game(const DomainGrid& grid, std::vector<Strategy> theta1, std::vector<Strategy> theta2,
                             double weight, double p_max) {
  IsaacsSpec spec = quadratic_inner_game(grid, std::move(theta1), std::move(theta2), p_max);
  spec.cost = [weight](const Point&, const Strategy& a, const Strategy& b) { return weight * a[0] * b[0]; };
  spec.description = "coupled cost game";
  return spec;
}

IsaacsSpec cost_only_game(const DomainGrid& grid, std::vector<Strategy> theta1, std::vector<Strategy> theta2,
                          double p_max) {
  IsaacsSpec spec = quadratic_inner_game(grid, std::move(theta1), std::move(theta2), p_max);
  spec.cost = [](const Point&, const Strategy& a, const Strategy& b) { return a.back() + b.back(); };
  spec.separable = true;
  spec.description = "cost-only game";
  return spec;
}

}  // namespace hjcert
