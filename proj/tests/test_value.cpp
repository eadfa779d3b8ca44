#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hjcert/action.hpp"
#include "hjcert/errors.hpp"
#include "hjcert/value.hpp"

using namespace hjcert;

namespace {

DomainGrid line(double lo, double hi, std::size_t n, DomainKind kind = DomainKind::box) {
  return DomainGrid::build({kind, {lo}, {hi}, {n}});
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

StationaryOptions options(double tau, VelocitySet v) {
  StationaryOptions o;
  o.tau = tau;
  o.velocities = std::move(v);
  return o;
}

const ScalarFn kSin = [](const Point& x) { return std::sin(2.0 * std::numbers::pi * x[0]); };

}  // namespace

TEST_CASE("velocity sets contain zero") {
  const auto s1 = stencil_velocities(1, 1.0);
  CHECK(s1.velocities.size() == 9);
  CHECK(s1.velocities.front() == Vector{0.0});
  CHECK(stencil_velocities(2, 1.0).velocities.size() == 1 + 16 + 16);
  const auto u = uniform_velocities(1, 2.0, 4);
  CHECK(u.velocities.size() == 5);
  CHECK(std::find(u.velocities.begin(), u.velocities.end(), Vector{0.0}) != u.velocities.end());
  CHECK_THROWS_AS(stencil_velocities(1, 0.0), ConfigError);
}

TEST_CASE("constant payoff gives a constant value function") {
  for (auto kind : {DomainKind::torus, DomainKind::box}) {
    const auto g = line(0.0, 1.0, 51, kind);
    const auto q = quadratic_hamiltonian(g);
    const auto r = solve_stationary(q, g, 0.5, [](const Point&) { return -1.25; }, options(0.02, stencil_velocities(1, 1.0)));
    for (double v : r.values) CHECK(std::abs(v + 1.25) <= 1e-8);
    CHECK(r.final_update <= r.tol);
  }
}

TEST_CASE("value function is bounded by the payoff") {
  const auto g = DomainGrid::build({DomainKind::box, {-1.0, -1.0}, {1.0, 1.0}, {21, 21}});
  const auto h = transport_quadratic_hamiltonian(g, AffineDrift{{0.3, -0.2}, {}});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> table(g.size());
    for (double& t : table) t = u(rng);
    const ScalarFn payoff = [&](const Point& x) { return g.interpolate(table, x); };
    const auto r = solve_stationary(h, g, 0.3, payoff, options(0.05, stencil_velocities(2, 1.0)));
    CHECK(sup_norm(r.values) <= sup_norm(table) + 1e-8);
  }
}

TEST_CASE("stationary sweep is a beta-contraction") {
  const auto g = line(0.0, 1.0, 64, DomainKind::torus);
  const auto q = quadratic_hamiltonian(g);
  const double lambda = 0.2, tau = 0.01;
  const auto payoff = g.sample(kSin);
  const auto op = stationary_operator(q, g, lambda, payoff, tau, uniform_velocities(1, 3.0, 31));
  CHECK(op.discount() == doctest::Approx(std::exp(-tau / lambda)));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
    }
    const auto ta = op.apply(a), tb = op.apply(b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      num = std::max(num, std::abs(ta[i] - tb[i]));
      den = std::max(den, std::abs(a[i] - b[i]));
    }
    CHECK(num / den <= op.discount() + 1e-12);
  }
}

TEST_CASE("direct trajectory search bounds the value from below") {
  const auto g = line(0.0, 1.0, 100, DomainKind::torus);
  const auto q = quadratic_hamiltonian(g);
  const double lambda = 0.1, tau = 0.01;
  const auto r = solve_stationary(q, g, lambda, kSin, options(tau, uniform_velocities(1, 4.0, 81)));
  const double tol = 5.0 * (g.max_spacing() + tau);
  std::vector<double> speeds;
  for (double v = -3.0; v <= 3.0 + 1e-12; v += 0.5) speeds.push_back(v);
  double worst = -INFINITY;
  for (std::size_t i = 0; i < g.size(); i += 5) {
    const Point x0 = g.point(i);
    double best = -INFINITY;
    for (double v1 : speeds) {
      for (double v2 : speeds) {
        for (double v3 : speeds) {
          std::vector<Point> pts{x0};
          for (double v : {v1, v2, v3}) pts.push_back({pts.back()[0] + 0.1 * v});
          const Curve c(g.geometry(), {0.0, 0.1, 0.2, 0.3}, pts);
          best = std::max(best, j_lambda(q, c, lambda, kSin, 0.3));
        }
      }
    }
    worst = std::max(worst, best - r.values[i]);
  }
  CHECK(worst <= tol);
}

TEST_CASE("non-convergence and inadmissible velocity sets") {
  const auto g = line(0.0, 1.0, 21, DomainKind::torus);
  const auto q = quadratic_hamiltonian(g);
  auto o = options(0.01, stencil_velocities(1, 1.0));
  o.max_iters = 2;
  try {
    solve_stationary(q, g, 1.0, kSin, o);
    FAIL("expected non-convergence");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_update() > o.tol);
  }
  CHECK_THROWS_AS(solve_stationary(norm_hamiltonian(g), g, 1.0, kSin, options(0.01, VelocitySet{{{2.0}}, "fast"})),
                  SchemeError);
  CHECK_THROWS_AS(solve_stationary(q, g, 0.0, kSin, options(0.01, stencil_velocities(1, 1.0))), PreconditionError);
  CHECK(default_max_iterations(0.5, 1.0, 1e-8) >= 20);
}

TEST_CASE("evolutionary layers") {
  const auto g = line(-1.0, 1.0, 41);
  const auto q = quadratic_hamiltonian(g);
  const ScalarFn u0 = [](const Point& x) { return std::cos(3.0 * x[0]); };
  const auto f = solve_evolutionary(q, g, 0.5, u0, 0.5, 0.05, stencil_velocities(1, 1.0));
  CHECK(f.layers.size() == 11);
  CHECK(f.layers.front() == g.sample(u0));
  CHECK(f.times.back() == doctest::Approx(0.5));
  // Values shrink with the discount when L >= 0.
  for (std::size_t k = 0; k < f.layers.size(); ++k) {
    CHECK(sup_norm(f.layers[k]) <= std::exp(-0.5 * f.times[k]) * sup_norm(f.layers.front()) + 1e-12);
  }
  const auto c = solve_evolutionary(q, g, 0.0, [](const Point&) { return 0.7; }, 0.5, 0.05, stencil_velocities(1, 1.0));
  for (const auto& layer : c.layers) {
    for (double v : layer) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
  }
  CHECK_THROWS_AS(solve_evolutionary(q, g, 0.0, u0, 0.52, 0.05, stencil_velocities(1, 1.0)), PreconditionError);
}

TEST_CASE("evolutionary scheme is monotone in the data") {
  const auto g = line(0.0, 1.0, 40, DomainKind::torus);
  const auto q = quadratic_hamiltonian(g);
  const auto lo = solve_evolutionary(q, g, 0.3, kSin, 0.3, 0.02, uniform_velocities(1, 2.0, 21));
  const auto hi = solve_evolutionary(q, g, 0.3, [](const Point& x) { return kSin(x) + 0.1 * (1.0 + std::cos(9.0 * x[0])); },
                                     0.3, 0.02, uniform_velocities(1, 2.0, 21));
  for (std::size_t k = 0; k < lo.layers.size(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(hi.layers[k][i] >= lo.layers[k][i]);
  }
}

TEST_CASE("Hopf-Lax oracle") {
  const auto g = line(-2.0, 2.0, 401);
  const VelocityCost half = [](const Vector& v) { return 0.5 * dot(v, v); };
  const auto flat = g.sample([](const Point&) { return 1.5; });
  CHECK(hopf_lax(g, flat, half, {0.3}, 0.5) == doctest::Approx(1.5));
  const auto parabola = g.sample([](const Point& x) { return -x[0] * x[0]; });
  CHECK(hopf_lax(g, parabola, half, {0.0}, 0.5) == doctest::Approx(0.0));
  // Closed form -x^2 / (1 + 2t) up to the grid resolution of y.
  for (double x : {-1.0, 0.4, 1.2}) {
    CHECK(hopf_lax(g, parabola, half, {x}, 0.1) == doctest::Approx(-x * x / 1.2).epsilon(1e-3));
  }
  CHECK_THROWS_AS(hopf_lax(g, parabola, half, {0.0}, 0.0), PreconditionError);
}

TEST_CASE("semicontinuous envelopes") {
  const auto g = line(0.0, 1.0, 12);
  const std::vector<double> flat(g.size(), 2.0);
  CHECK(usc_regularize(g, flat) == flat);
  CHECK(lsc_regularize(g, flat) == flat);

  std::vector<double> spike(g.size(), 0.0);
  spike[5] = 1.0;
  const auto up = usc_regularize(g, spike);
  CHECK(up[4] == 1.0);
  CHECK(up[5] == 1.0);
  CHECK(up[6] == 1.0);
  CHECK(up[7] == 0.0);
  CHECK(lsc_regularize(g, spike)[5] == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> f(g.size());
    for (double& x : f) x = u(rng);
    const auto hi = usc_regularize(g, f), lo = lsc_regularize(g, f);
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(lo[i] <= f[i]);
      CHECK(f[i] <= hi[i]);
    }
    // Dilation alone is not idempotent, but closing and opening are.
    const auto closing = lsc_regularize(g, hi);
    const auto opening = usc_regularize(g, lo);
    CHECK(lsc_regularize(g, usc_regularize(g, closing)) == closing);
    CHECK(usc_regularize(g, lsc_regularize(g, opening)) == opening);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(closing[i] >= f[i]);
  }
}

TEST_CASE("space-time envelopes reach across layers") {
  const auto g = line(0.0, 1.0, 5, DomainKind::torus);
  std::vector<std::vector<double>> layers(4, std::vector<double>(g.size(), 0.0));
  layers[2][0] = 1.0;
  const auto up = usc_regularize(g, layers);
  CHECK(up[1][1] == 1.0);
  CHECK(up[3][4] == 1.0);
  CHECK(up[0][0] == 0.0);
}

TEST_CASE("dynamic programming residual") {
  const auto g = line(0.0, 1.0, 100, DomainKind::torus);
  const auto q = quadratic_hamiltonian(g);
  const double lambda = 0.1, tau = 0.01;
  const auto v = uniform_velocities(1, 4.0, 81);
  const auto flat = solve_stationary(q, g, lambda, [](const Point&) { return 0.3; }, options(tau, v));
  CHECK(dpp_residual(q, flat, [](const Point&) { return 0.3; }, 0.05).max_abs <= 1e-8);

  const auto r = solve_stationary(q, g, lambda, kSin, options(tau, v));
  const auto res = dpp_residual(q, r, kSin, 5.0 * tau);
  CHECK(res.max <= 5.0 * (tau + g.max_spacing()));
  ValueField one = r;
  one.values = stationary_operator(q, g, lambda, g.sample(kSin), tau, v).apply(g.sample(kSin));
  CHECK(dpp_residual(q, one, kSin, 5.0 * tau).max > res.max);
}
