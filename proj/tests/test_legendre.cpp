#include <doctest.h>

#include <cmath>
#include <random>

#include "hjcert/errors.hpp"
#include "hjcert/legendre.hpp"

using namespace hjcert;

namespace {

DomainGrid line(double lo, double hi, std::size_t n) { return DomainGrid::build({DomainKind::box, {lo}, {hi}, {n}}); }

std::vector<Point> nodes(const DomainGrid& g) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < g.size(); ++i) out.push_back(g.point(i));
  return out;
}

}  // namespace

TEST_CASE("quadratic conjugate, analytic and numerical") {
  const auto g = line(-1.0, 1.0, 5);
  const auto h = quadratic_hamiltonian(g);
  const auto a = conjugate(h, {0.0}, {1.0});
  CHECK(a.analytic);
  CHECK(a.value == 0.5);
  CHECK(a.argmax_p[0] == doctest::Approx(1.0).epsilon(1e-6));
  ConjugateOptions numeric;
  numeric.force_numeric = true;
  const auto n = conjugate(h, {0.0}, {1.0}, numeric);
  CHECK_FALSE(n.analytic);
  CHECK_FALSE(n.saturated);
  CHECK(n.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(n.argmax_p[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("conjugate at v = 0 is nonnegative") {
  const auto g = line(-1.0, 1.0, 5);
  AffineDrift drift{{0.3}, {{-0.7}}};
  for (const auto& h : {quadratic_hamiltonian(g, 2.0), transport_quadratic_hamiltonian(g, drift),
                        norm_hamiltonian(g, 1.5),
                        custom_hamiltonian(g, [](const Point&, const Covector& p) { return std::pow(p[0], 4); }, true,
                                           3.0)}) {
    const auto numeric = without_conjugate(h, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(lagrangian(numeric, g.point(i), {0.0}) >= 0.0);
      if (h.has_conjugate()) CHECK(lagrangian(h, g.point(i), {0.0}) >= -1e-12);
    }
  }
}

TEST_CASE("norm Hamiltonian conjugate: zero inside, saturated outside") {
  const auto g = line(-1.0, 1.0, 5);
  const auto h = without_conjugate(norm_hamiltonian(g), g);
  const auto inside = conjugate(h, {0.0}, {0.5});
  CHECK(inside.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(inside.saturated);
  double last = -1.0;
  for (double pmax : {1.0, 10.0, 100.0}) {
    const auto wide = without_conjugate(norm_hamiltonian(g, 1.0, pmax), g);
    const auto out = conjugate(wide, {0.0}, {2.0});
    CHECK(out.saturated);
    CHECK(out.value == doctest::Approx(pmax).epsilon(1e-9));
    CHECK(out.value > last);
    last = out.value;
  }
  CHECK(conjugate(norm_hamiltonian(g), {0.0}, {2.0}).infinite());
}

TEST_CASE("Fenchel-Young gap examples") {
  const auto g = line(-1.0, 1.0, 5);
  const auto h = quadratic_hamiltonian(g);
  CHECK(fenchel_young_gap(h, {0.0}, {1.0}, {1.0}) == 0.0);
  CHECK(fenchel_young_gap(h, {0.0}, {1.0}, {0.0}) == 0.5);
  CHECK(fenchel_young_gap(norm_hamiltonian(g), {0.0}, {3.0}, {1.0}) == INFINITY);
}

TEST_CASE("Fenchel-Young holds on random samples") {
  const auto g = DomainGrid::build({DomainKind::box, {-1.0, -1.0}, {1.0, 1.0}, {5, 5}});
  AffineDrift drift{{0.2, -0.1}, {{0.0, 1.0}, {-1.0, 0.0}}};
  const auto h = transport_quadratic_hamiltonian(g, drift);
  const auto numeric = without_conjugate(h, g);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_analytic = INFINITY, worst_numeric = INFINITY;
  for (int k = 0; k < 2000; ++k) {
    const Point x{u(rng), u(rng)};
    const Vector v{2.0 * u(rng), 2.0 * u(rng)};
    const Covector p{3.0 * u(rng), 3.0 * u(rng)};
    worst_analytic = std::min(worst_analytic, fenchel_young_gap(h, x, v, p));
    if (k < 200) worst_numeric = std::min(worst_numeric, fenchel_young_gap(numeric, x, v, p));
  }
  CHECK(worst_analytic >= -kAnalyticConjugateTolerance);
  CHECK(worst_numeric >= -kGridConjugateTolerance);
}

TEST_CASE("enlarging the p-box never lowers the numerical conjugate") {
  const auto g = line(-1.0, 1.0, 5);
  auto quartic = [](const Point&, const Covector& p) { return 0.25 * std::pow(p[0], 4) + 0.5 * p[0] * p[0]; };
  ConjugateOptions o;
  o.dp = 0.01;
  o.refine = false;
  for (double v : {0.1, 1.0, 5.0, 40.0}) {
    const double small = lagrangian(custom_hamiltonian(g, quartic, true, 1.0), {0.0}, {v}, o);
    const double large = lagrangian(custom_hamiltonian(g, quartic, true, 4.0), {0.0}, {v}, o);
    CHECK(large >= small);
  }
}

TEST_CASE("evaluation errors surface") {
  const auto g = line(-1.0, 1.0, 5);
  const auto h = custom_hamiltonian(
      g, [](const Point&, const Covector& p) { return p[0] > 1.5 ? NAN : 0.5 * p[0] * p[0]; }, true, 2.0);
  CHECK_THROWS_AS(lagrangian(h, {0.0}, {1.0}), EvaluationError);
}

TEST_CASE("h_bar examples") {
  const auto g = line(-1.0, 1.0, 21);
  const auto pts = nodes(g);
  CHECK(h_bar(quadratic_hamiltonian(g), pts, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h_bar(norm_hamiltonian(g), pts, 3.0) == doctest::Approx(3.0).epsilon(1e-12));
  const auto t = transport_quadratic_hamiltonian(g, AffineDrift{{}, {{1.0}}});
  CHECK(h_bar(t, pts, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(h_bar(t, std::vector<Point>{}, 1.0), PreconditionError);
  CHECK_THROWS_AS(h_bar(t, pts, 0.0), PreconditionError);
  const auto g2 = DomainGrid::build({DomainKind::box, {-1.0, -1.0}, {1.0, 1.0}, {3, 3}});
  const std::vector<Point> one{{0.0, 0.0}};
  CHECK(h_bar(quadratic_hamiltonian(g2), one, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("psi for the quadratic Hamiltonian is C sqrt(2 r)") {
  const auto g = line(-1.0, 1.0, 41);
  const auto f = SmoothTestFunction::quadratic(g.geometry(), {0.0}, 1.5);
  const auto pts = nodes(g);
  const PsiFunction psi = build_psi(quadratic_hamiltonian(g), f, pts);
  CHECK(psi.constant() == doctest::Approx(1.5));
  for (std::size_t k = 0; k < psi.r_table().size(); ++k) {
    const double r = psi.r_table()[k];
    CHECK(psi.psi_table()[k] == doctest::Approx(1.5 * std::sqrt(2.0 * r)).epsilon(1e-3));
  }
  // Between knots the interpolant stays within the same relative band.
  for (double r : {1e-3, 0.01, 0.3, 7.0, 40.0}) {
    if (r < psi.r_table().front()) continue;
    CHECK(psi(r) == doctest::Approx(1.5 * std::sqrt(2.0 * r)).epsilon(1e-3));
  }
  // nondecreasing
  double prev = 0.0;
  for (double r = 1e-5; r < 100.0; r *= 1.3) {
    CHECK(psi(r) >= prev);
    prev = psi(r);
  }
  CHECK(psi.psi_over_r(psi.r_table().back()) < 0.1 * psi.psi_over_r(psi.r_table().front()));
}

TEST_CASE("psi rejects flat conjugates") {
  const auto g = line(-1.0, 1.0, 11);
  const auto f = SmoothTestFunction::quadratic(g.geometry(), {0.0}, 1.0);
  const auto pts = nodes(g);
  PsiOptions o;
  o.s_max = 0.9;  // L = 0 on |v| <= 1 for the norm Hamiltonian
  CHECK_THROWS_AS(build_psi(norm_hamiltonian(g), f, pts, o), ConstructionError);
  CHECK_THROWS_AS(build_psi(quadratic_hamiltonian(g), f, std::vector<Point>{}, o), PreconditionError);
}
