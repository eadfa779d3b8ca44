#include <doctest.h>

#include <cmath>
#include <random>

#include "hjcert/containment.hpp"
#include "hjcert/errors.hpp"
#include "hjcert/grid.hpp"
#include "hjcert/hamiltonian.hpp"
#include "hjcert/test_function.hpp"

using namespace hjcert;

namespace {

DomainGrid grid1(DomainKind kind, double lo, double hi, std::size_t n) {
  return DomainGrid::build({kind, {lo}, {hi}, {n}});
}

}  // namespace

TEST_CASE("box grid points and spacing") {
  const auto g = grid1(DomainKind::box, -1.0, 1.0, 5);
  CHECK(g.size() == 5);
  CHECK(g.spacing()[0] == doctest::Approx(0.5));
  const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (std::size_t i = 0; i < 5; ++i) CHECK(g.point(i)[0] == doctest::Approx(expected[i]).epsilon(1e-15));
}

TEST_CASE("torus grid points and wrap") {
  const auto g = grid1(DomainKind::torus, 0.0, 1.0, 4);
  const double expected[] = {0.0, 0.25, 0.5, 0.75};
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.point(i)[0] == expected[i]);
  CHECK(g.spacing()[0] == 0.25);
  CHECK(g.wrap({1.0})[0] == 0.0);
  CHECK(g.wrap({-0.25})[0] == doctest::Approx(0.75));
  CHECK(g.wrap(g.wrap({3.3}))[0] == g.wrap({3.3})[0]);
}

TEST_CASE("2d box grid") {
  const auto g = DomainGrid::build({DomainKind::box, {0.0, 0.0}, {1.0, 1.0}, {11, 11}});
  CHECK(g.size() == 121);
  CHECK(g.spacing()[0] == doctest::Approx(0.1));
  CHECK(g.spacing()[1] == doctest::Approx(0.1));
}

TEST_CASE("grid index and point round trip") {
  for (auto kind : {DomainKind::box, DomainKind::torus}) {
    const auto g = DomainGrid::build({kind, {-1.0, 0.0}, {2.0, 1.0}, {7, 5}});
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g.flat_index(g.multi_index(i)) == i);
      CHECK(g.nearest_index(g.point(i)) == i);
    }
  }
  const auto t = grid1(DomainKind::torus, 0.0, 1.0, 10);
  CHECK(t.nearest_index(std::vector<double>{1.3}) == 3);
}

TEST_CASE("grid configuration errors") {
  CHECK_THROWS_AS(grid1(DomainKind::box, 1.0, 1.0, 5), ConfigError);
  CHECK_THROWS_AS(grid1(DomainKind::box, 2.0, 1.0, 5), ConfigError);
  CHECK_THROWS_AS(grid1(DomainKind::box, 0.0, 1.0, 2), ConfigError);
  DomainConfig big{DomainKind::box, {0.0, 0.0}, {1.0, 1.0}, {1000, 1000}, 10000};
  CHECK_THROWS_AS(DomainGrid::build(big), ResourceError);
}

TEST_CASE("stencil weights form a partition of unity") {
  const auto g = DomainGrid::build({DomainKind::torus, {0.0, 0.0}, {1.0, 1.0}, {8, 6}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const Stencil s = g.stencil(std::vector<double>{u(rng), u(rng)});
    double sum = 0.0;
    for (double w : s.weights) {
      CHECK(w >= -1e-15);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("neighbourhoods wrap on tori and truncate on boxes") {
  CHECK(grid1(DomainKind::torus, 0.0, 1.0, 10).neighborhood(0, 1).size() == 3);
  CHECK(grid1(DomainKind::box, 0.0, 1.0, 10).neighborhood(0, 1).size() == 2);
}

TEST_CASE("Hamiltonian must vanish at p = 0") {
  const auto g = grid1(DomainKind::box, -1.0, 1.0, 11);
  CHECK_THROWS_AS(custom_hamiltonian(g, [](const Point&, const Covector& p) { return 1.0 + p[0] * p[0]; }, true, 2.0),
                  ConstructionError);
  CHECK_THROWS_AS(custom_hamiltonian(g, [](const Point& x, const Covector&) { return x[0]; }, true, 2.0),
                  ConstructionError);
  const auto h = quadratic_hamiltonian(g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(h(g.point(i), {0.0}) == 0.0);
  CHECK_THROWS_AS(norm_hamiltonian(g).p_gradient({0.0}, {1.0}), CapabilityError);
}

TEST_CASE("standard containment on a torus is trivial") {
  const auto g = grid1(DomainKind::torus, 0.0, 1.0, 20);
  const auto u = standard_containment(g, quadratic_hamiltonian(g));
  CHECK(u.constant() == 0.0);
  CHECK(u.certified());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(u(g.point(i)) == 0.0);
}

TEST_CASE("standard containment constants on [-2,2]") {
  const auto g = grid1(DomainKind::box, -2.0, 2.0, 401);
  // sup of (1/2)(x / (1 + x^2))^2 is 1/8 at |x| = 1, a grid node.
  const auto q = standard_containment(g, quadratic_hamiltonian(g));
  CHECK(q.constant() == doctest::Approx(0.125 + 1e-6).epsilon(1e-12));
  const auto n = standard_containment(g, norm_hamiltonian(g));
  CHECK(n.constant() == doctest::Approx(0.5 + 1e-6).epsilon(1e-12));
  CHECK(q.center()->at(0) == doctest::Approx(0.0));
  for (const auto* u : {&q, &n}) {
    CHECK(u->certified());
    const auto& h = u == &q ? quadratic_hamiltonian(g) : norm_hamiltonian(g);
    CHECK(containment_supremum(g, h, *u) - u->constant() <= 0.0);
  }
}

TEST_CASE("custom containment certification and validation") {
  const auto g = grid1(DomainKind::box, -2.0, 2.0, 401);
  const auto h = quadratic_hamiltonian(g);
  CHECK_FALSE(custom_containment(g, h, {0.0}, 0.1).certified());
  CHECK(custom_containment(g, h, {0.0}, 0.2).certified());
  const ContainmentSpec shifted([](const Point& x) { return 1.0 + x[0] * x[0]; },
                                [](const Point& x) { return Covector{2.0 * x[0]}; }, 1.0, true, "bad");
  CHECK_THROWS_AS(validate_containment(g, shifted), ConstructionError);
  const ContainmentSpec wiggly([](const Point& x) { return x[0] * x[0] * (1.0 + std::cos(8.0 * x[0])); },
                               [](const Point&) { return Covector{0.0}; }, 1.0, true, "bad");
  CHECK_THROWS_AS(validate_containment(g, wiggly), ConstructionError);
}

TEST_CASE("non-finite containment supremum is reported") {
  const auto g = grid1(DomainKind::box, -1.0, 1.0, 11);
  const auto h = custom_hamiltonian(
      g, [](const Point&, const Covector& p) { return p[0] == 0.0 ? 0.0 : INFINITY; }, true, 1.0);
  CHECK_THROWS_AS(standard_containment(g, h), EvaluationError);
}

TEST_CASE("test function differentials match central differences") {
  const auto box = grid1(DomainKind::box, -1.0, 1.0, 101);
  const auto torus = DomainGrid::build({DomainKind::torus, {0.0, 0.0}, {1.0, 1.0}, {60, 60}});
  const std::vector<std::pair<const DomainGrid*, SmoothTestFunction>> cases{
      {&box, SmoothTestFunction::quadratic(box.geometry(), {0.2}, 2.0, 1.0)},
      {&box, SmoothTestFunction::bump(box.geometry(), {0.1}, 0.5, 0.6)},
      {&torus, SmoothTestFunction::bump(torus.geometry(), {0.9, 0.1}, 2.0, 0.3)},
  };
  for (const auto& [g, f] : cases) {
    const double dx = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const auto mi = g->multi_index(i);
      bool interior = true;
      for (std::size_t a = 0; a < mi.size(); ++a) interior &= mi[a] > 0 && mi[a] + 1 < g->nodes_per_axis()[a];
      if (!interior && !g->is_torus()) continue;
      const Point x = g->point(i);
      const Covector df = f.differential(x);
      for (std::size_t a = 0; a < x.size(); ++a) {
        Point xp = x, xm = x;
        xp[a] += dx;
        xm[a] -= dx;
        worst = std::max(worst, std::abs((f(xp) - f(xm)) / (2.0 * dx) - df[a]));
      }
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("test function boundedness tags") {
  const auto box = grid1(DomainKind::box, -1.0, 1.0, 11);
  const auto torus = grid1(DomainKind::torus, 0.0, 1.0, 11);
  CHECK(SmoothTestFunction::quadratic(box.geometry(), {0.0}, 1.0).boundedness() == Boundedness::lower_bounded);
  CHECK(SmoothTestFunction::quadratic(box.geometry(), {0.0}, -1.0).boundedness() == Boundedness::upper_bounded);
  CHECK(SmoothTestFunction::bump(box.geometry(), {0.0}, 1.0, 0.5).boundedness() == Boundedness::bounded);
  CHECK(SmoothTestFunction::constant(1, 2.0)({0.3}) == 2.0);
  CHECK_THROWS_AS(SmoothTestFunction::quadratic(torus.geometry(), {0.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(SmoothTestFunction::bump(torus.geometry(), {0.0}, 1.0, 0.6), ConfigError);
  // Bump: a - b r^2 at the centre, a outside the radius.
  const auto f = SmoothTestFunction::bump(box.geometry(), {0.0}, 2.0, 0.5, 1.0);
  CHECK(f({0.0}) == doctest::Approx(1.0 - 2.0 * 0.25));
  CHECK(f({0.7}) == 1.0);
}
