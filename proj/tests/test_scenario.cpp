#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "hjcert/errors.hpp"
#include "hjcert/io.hpp"
#include "hjcert/parallel.hpp"
#include "hjcert/scenario.hpp"
#include "hjcert/viscosity.hpp"

using namespace hjcert;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = HJCERT_SCENARIO_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hjcert_unit";
  fs::create_directories(dir);
  return dir / name;
}

json minimal() {
  return json::parse(R"({
    "domain": {"kind": "torus", "lower": [0.0], "upper": [1.0], "nodes": 20},
    "hamiltonian": {"variant": "quadratic"},
    "problem": {"type": "stationary", "lambda": 0.5, "h": {"kind": "constant", "value": 1.0}}
  })");
}

std::string pointer_of(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

struct ThreadsGuard {
  explicit ThreadsGuard(const char* value) { setenv("HJCERT_THREADS", value, 1); }
  ~ThreadsGuard() { unsetenv("HJCERT_THREADS"); }
};

}  // namespace

TEST_CASE("shipped scenarios parse and normalise") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    CAPTURE(entry.path().string());
    const Scenario s = load_scenario(entry.path().string());
    const json once = to_json(s);
    CHECK(to_json(parse_scenario(once)) == once);
  }
  CHECK(seen >= 6);
}

TEST_CASE("configuration errors carry JSON pointers") {
  auto doc = minimal();
  CHECK(pointer_of(doc) == "<accepted>");
  doc["problem"].erase("lambda");
  CHECK(pointer_of(doc) == "/problem/lambda");

  doc = minimal();
  doc["scheme"] = {{"tua", 0.1}};
  CHECK(pointer_of(doc) == "/scheme/tua");

  doc = minimal();
  doc["domain"]["nodes"] = 2;
  CHECK(pointer_of(doc) == "/domain/nodes");

  doc = minimal();
  doc["hamiltonian"] = {{"variant", "cubic"}};
  CHECK(pointer_of(doc) == "/hamiltonian/variant");

  doc = minimal();
  doc["problem"]["lambda"] = "fast";
  CHECK(pointer_of(doc) == "/problem/lambda");
}

TEST_CASE("games that break the assumptions are rejected at build time") {
  const Scenario s = load_scenario((kScenarios / "isaacs_coupled.json").string());
  try {
    build_model(s);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.pointer() == "/hamiltonian");
  }
  CHECK_NOTHROW(build_model(load_scenario((kScenarios / "isaacs_separable.json").string())));
}

TEST_CASE("field files round-trip bit for bit") {
  const auto g = DomainGrid::build({DomainKind::box, {-1.0, 0.0}, {1.0, 3.0}, {7, 5}});
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1e3);
  std::vector<double> values(g.size());
  for (double& v : values) v = n(rng) * std::exp(n(rng) / 200.0);
  values[3] = 0.1;
  values[4] = -0.0;
  const auto path = scratch("field.csv").string();
  write_field_csv(path, g, values);
  CHECK(read_field_csv(path, g) == values);
  CHECK(read_text(path).rfind("x1,x2,value\n", 0) == 0);

  const std::vector<double> times{0.0, 0.25, 0.5};
  const std::vector<std::vector<double>> layers{values, values, values};
  const auto tpath = scratch("tfield.csv").string();
  write_time_field_csv(tpath, g, times, layers);
  const auto back = read_time_field_csv(tpath, g);
  CHECK(back.times == times);
  CHECK(back.layers == layers);

  const Curve c(g.geometry(), {0.0, 0.3, 1.0 / 3.0}, {{0.0, 1.0}, {0.2, 1.1}, {-1.0, 3.0}});
  const auto cpath = scratch("curve.csv").string();
  write_curve_csv(cpath, c);
  const Curve cb = read_curve_csv(cpath, g.geometry());
  CHECK(cb.times() == c.times());
  CHECK(cb.points() == c.points());

  const auto other = DomainGrid::build({DomainKind::box, {-1.0, 0.0}, {1.0, 3.0}, {7, 6}});
  CHECK_THROWS_AS(read_field_csv(path, other), ConfigError);
  const auto shifted = DomainGrid::build({DomainKind::box, {-1.0, 0.5}, {1.0, 3.5}, {7, 5}});
  CHECK_THROWS_AS(read_field_csv(path, shifted), ConfigError);
  CHECK_THROWS_AS(read_text(scratch("missing/none.csv").string()), ResourceError);
}

TEST_CASE("manifest contents") {
  const Scenario s = load_scenario((kScenarios / "sin_torus.json").string());
  const Model m = build_model(s);
  const json j = manifest(s, m, "solve-stationary");
  for (const char* key : {"tool", "version", "compiler", "subcommand", "scenario", "derived", "constants"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["derived"]["beta"].get<double>() == doctest::Approx(std::exp(-0.1)));
  CHECK(j["derived"]["certificate_tol"].get<double>() == doctest::Approx(5.0 * (0.01 + 0.01)));
  CHECK(j["scenario"]["seed"].is_number());
  for (const char* stamp : {"timestamp", "date", "created", "hostname"}) CHECK(j.dump().find(stamp) == std::string::npos);
  CHECK(manifest(s, m, "solve-stationary").dump() == j.dump());
}

TEST_CASE("results do not depend on the thread count") {
  const Scenario s = load_scenario((kScenarios / "transport_2d.json").string());
  auto run = [&](const char* threads) {
    ThreadsGuard guard(threads);
    CHECK(thread_count() == static_cast<std::size_t>(std::atoi(threads)));
    const Model m = build_model(s);
    StationaryOptions o;
    o.tau = s.scheme.tau;
    o.velocities = m.velocities;
    o.tol = s.scheme.tol;
    const auto r = solve_stationary(m.hamiltonian, m.grid, s.problem.lambda, m.field, o);
    const auto cert = certify_stationary(m.grid, r.values, m.hamiltonian, m.containment, s.problem.lambda, m.field,
                                         bump_test_family(m.grid), m.certificate_tol);
    std::vector<double> residuals;
    for (const auto& e : cert.entries) residuals.push_back(e.residual);
    return std::make_pair(r.values, residuals);
  };
  const auto one = run("1");
  const auto four = run("4");
  CHECK(one.first == four.first);
  CHECK(one.second == four.second);
}
