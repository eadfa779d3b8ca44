// Command-line front end: every subcommand reads a scenario JSON and writes
// CSV/JSON artifacts plus a run manifest next to them.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "hjcert/action.hpp"
#include "hjcert/errors.hpp"
#include "hjcert/io.hpp"
#include "hjcert/isaacs.hpp"
#include "hjcert/legendre.hpp"
#include "hjcert/parallel.hpp"
#include "hjcert/scenario.hpp"
#include "hjcert/value.hpp"
#include "hjcert/viscosity.hpp"

namespace fs = std::filesystem;
using namespace hjcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCertFail = 2;

struct Args {
  std::string scenario;
  std::string out;
  std::string field;
  std::string curve;
  std::string report;
  double spike = 0.0;
  bool spike_given = false;
  long long node = -1;
  std::size_t samples = 1000;
};

std::string output_path(const Scenario& s, const std::string& given, const std::string& fallback) {
  if (!given.empty()) return given;
  fs::create_directories(s.output_dir);
  return (fs::path(s.output_dir) / fallback).string();
}

void write_manifest(const Scenario& s, const Model& m, const std::string& sub, const json& result) {
  fs::create_directories(s.output_dir);
  write_text((fs::path(s.output_dir) / (sub + ".manifest.json")).string(), manifest(s, m, sub, result).dump(2) + "\n");
}

void require_type(const Scenario& s, const std::string& type) {
  if (s.problem.type != type) throw ConfigError("this subcommand needs a " + type + " problem", "/problem/type");
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

StationaryOptions stationary_options(const Scenario& s, const Model& m) {
  StationaryOptions o;
  o.tau = s.scheme.tau;
  o.velocities = m.velocities;
  o.tol = s.scheme.tol;
  o.max_iters = s.scheme.max_iters;
  o.conjugate = m.conjugate;
  return o;
}

std::vector<TestPairSpec> family(const Scenario& s, const Model& m) {
  FamilyOptions f;
  f.centers = s.certify.centers;
  f.curvatures = s.certify.curvatures;
  f.epsilons = s.certify.epsilons;
  f.radius_fraction = s.certify.radius_fraction;
  return bump_test_family(m.grid, f);
}

json report_json(const CertificateReport& r, const DomainGrid& grid, const std::string& kind) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json j = {{"kind", to_string(e.kind)},
              {"eps", e.epsilon},
              {"center", e.center},
              {"curvature", e.curvature},
              {"x0", grid.point(e.x0)},
              {"x0_index", e.x0},
              {"residual", e.residual},
              {"tol", e.tol},
              {"verdict", e.pass ? "pass" : "fail"},
              {"branch", e.branch},
              {"sublevel_bound", e.sublevel_bound}};
    if (e.t0) j["t0"] = *e.t0;
    if (e.time_test) j["time_test"] = {{"alpha", e.time_test->alpha}, {"beta", e.time_test->beta}};
    json trace = json::array();
    for (const auto& st : e.trace) trace.push_back({{"n", st.n}, {"node", st.node}, {"gap", st.gap}});
    if (!trace.empty()) j["almost_optimizers"] = trace;
    entries.push_back(j);
  }
  return {{"problem", kind},
          {"aggregate", r.aggregate_pass ? "pass" : "fail"},
          {"failures", r.failures},
          {"tol", r.tol},
          {"radius", r.radius},
          {"note", "finite test family: a falsification suite, not a proof"},
          {"entries", entries}};
}

SmoothTestFunction default_test_function(const Model& m, double curvature) {
  const Point c = m.grid.point(m.grid.center_index());
  if (m.grid.is_torus()) {
    double extent = m.grid.upper()[0] - m.grid.lower()[0];
    for (std::size_t a = 1; a < m.grid.dimension(); ++a) extent = std::min(extent, m.grid.upper()[a] - m.grid.lower()[a]);
    return SmoothTestFunction::bump(m.grid.geometry(), c, std::abs(curvature), 0.25 * extent);
  }
  return SmoothTestFunction::quadratic(m.grid.geometry(), c, curvature);
}

int solve_stationary_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  require_type(s, "stationary");
  const Model m = build_model(s);
  const ValueField f = solve_stationary(m.hamiltonian, m.grid, s.problem.lambda, m.field, stationary_options(s, m));
  const std::string path = output_path(s, a.out, "field.csv");
  write_field_csv(path, m.grid, f.values);
  const json result = {{"field", path},
                       {"iterations", f.iterations},
                       {"final_update", f.final_update},
                       {"sup_R", sup_norm(f.values)},
                       {"sup_h", sup_norm(m.grid.sample(m.field))}};
  write_manifest(s, m, "solve-stationary", result);
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int solve_evolution_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  require_type(s, "evolutionary");
  const Model m = build_model(s);
  const TimeValueField f = solve_evolutionary(m.hamiltonian, m.grid, s.problem.lambda, m.field, s.problem.horizon,
                                              s.scheme.tau, m.velocities, m.conjugate);
  const std::string path = output_path(s, a.out, "field.csv");
  write_time_field_csv(path, m.grid, f.times, f.layers);
  const json result = {{"field", path}, {"layers", f.layers.size()}, {"sup_final", sup_norm(f.layers.back())}};
  write_manifest(s, m, "solve-evolution", result);
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int certify_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  const Model m = build_model(s);
  const auto fam = family(s, m);
  json report;
  bool pass = false;
  if (s.problem.type == "stationary") {
    const std::vector<double> values = read_field_csv(a.field, m.grid);
    const CertificateReport r = certify_stationary(m.grid, values, m.hamiltonian, m.containment, s.problem.lambda,
                                                   m.field, fam, m.certificate_tol, s.certify.radius);
    report = report_json(r, m.grid, "stationary");
    pass = r.aggregate_pass;
    if (s.certify.dpp_horizon > 0.0) {
      ValueField field{m.grid, values, s.problem.lambda, s.scheme.tau, 0, 0.0, s.scheme.tol, m.velocities};
      const DppResidual d = dpp_residual(m.hamiltonian, field, m.field, s.certify.dpp_horizon, 16, m.conjugate);
      report["dpp"] = {{"horizon", s.certify.dpp_horizon}, {"max", d.max}, {"max_abs", d.max_abs}};
    }
  } else {
    const TimeFieldData data = read_time_field_csv(a.field, m.grid);
    TimeValueField field{m.grid, data.times, data.layers, s.problem.lambda, s.scheme.tau, m.velocities};
    const CertificateReport r = certify_evolutionary(field, m.hamiltonian, m.containment, m.field, fam,
                                                     s.certify.time_tests, m.certificate_tol, s.certify.radius);
    report = report_json(r, m.grid, "evolutionary");
    pass = r.aggregate_pass;
  }
  const std::string path = output_path(s, a.report, "report.json");
  write_text(path, report.dump(2) + "\n");
  write_manifest(s, m, "certify",
                 {{"report", path}, {"field", a.field}, {"aggregate", report["aggregate"]},
                  {"failures", report["failures"]}});
  std::cout << "aggregate " << report["aggregate"].get<std::string>() << " (" << report["failures"].get<std::size_t>()
            << " failing of " << report["entries"].size() << ", tol " << format_double(m.certificate_tol) << ")\n";
  return pass ? kExitOk : kExitCertFail;
}

int legendre_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  const Model m = build_model(s);
  const Point x = m.grid.point(m.grid.center_index());
  const VelocitySet vs = uniform_velocities(m.grid.dimension(), s.legendre.v_max, s.legendre.v_count);
  const std::size_t d = m.grid.dimension();
  std::string csv;
  for (std::size_t k = 1; k <= d; ++k) csv += "x" + std::to_string(k) + ",";
  for (std::size_t k = 1; k <= d; ++k) csv += "v" + std::to_string(k) + ",";
  csv += "L";
  for (std::size_t k = 1; k <= d; ++k) csv += ",argmax_p" + std::to_string(k);
  csv += ",saturated\n";
  std::size_t saturated = 0;
  for (const auto& v : vs.velocities) {
    const LagrangianValue l = conjugate(m.hamiltonian, x, v, m.conjugate);
    for (double c : x) csv += format_double(c) + ",";
    for (double c : v) csv += format_double(c) + ",";
    csv += l.infinite() ? std::string("inf") : format_double(l.value);
    for (std::size_t k = 0; k < d; ++k) csv += "," + (l.argmax_p.empty() ? std::string("nan") : format_double(l.argmax_p[k]));
    csv += l.saturated ? ",1\n" : ",0\n";
    saturated += l.saturated ? 1 : 0;
  }
  const std::string path = output_path(s, a.out, "legendre.csv");
  write_text(path, csv);
  const json result = {{"table", path}, {"rows", vs.velocities.size()}, {"saturated", saturated}, {"x", x}};
  write_manifest(s, m, "legendre-table", result);
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int psi_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  const Model m = build_model(s);
  PsiOptions o;
  o.s_min = s.psi.s_min;
  o.s_max = s.psi.s_max;
  o.table_size = s.psi.table_size;
  o.v_max = s.psi.v_max;
  o.directions_2d = s.psi.directions_2d;
  o.conjugate = m.conjugate;
  std::vector<Point> compact;
  for (std::size_t i = 0; i < m.grid.size(); ++i) compact.push_back(m.grid.point(i));
  const PsiFunction psi = build_psi(m.hamiltonian, default_test_function(m, s.psi.curvature), compact, o);
  const auto table = psi.psi_table();
  std::string csv = "r,psi,psi_over_r\n";
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double r = psi.r_table()[k];
    csv += format_double(r) + "," + format_double(table[k]) + "," + format_double(table[k] / r) + "\n";
  }
  const std::string path = output_path(s, a.out, "psi.csv");
  write_text(path, csv);
  const json result = {{"table", path}, {"rows", table.size()}, {"C", psi.constant()}, {"v_max", psi.v_max()}};
  write_manifest(s, m, "psi-table", result);
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int isaacs_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  if (s.hamiltonian.variant != "isaacs") throw ConfigError("isaacs-check needs variant 'isaacs'", "/hamiltonian/variant");
  // The game is inspected even when it violates the standing assumptions,
  // so build the grid and game without going through build_model.
  const DomainGrid grid = DomainGrid::build(s.domain);
  const IsaacsSpec game = build_game(s.hamiltonian, grid);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> unif(-s.hamiltonian.p_max, s.hamiltonian.p_max);
  std::vector<Covector> ps(a.samples, Covector(grid.dimension()));
  for (auto& p : ps) {
    for (double& c : p) c = unif(rng);
  }
  const IsaacsGapReport gap = isaacs_gap(game, grid, ps);
  const IsaacsValidity validity = validate_isaacs(game, grid);
  json result = {{"max_gap", gap.max_gap},
                 {"min_gap", gap.min_gap},
                 {"tol", gap.tol},
                 {"holds", gap.holds},
                 {"samples", gap.samples},
                 {"weak_duality", gap.min_gap >= -1e-12},
                 {"valid", validity.valid()},
                 {"cost_nonneg", validity.cost_nonneg},
                 {"zero_at_origin", validity.zero_at_origin},
                 {"messages", validity.messages}};
  if (validity.valid()) {
    const Model m = build_model(s);
    const IsaacsValidity full = validate_isaacs(game, grid, m.containment);
    result["uniform_containment"] = full.uniform_containment;
    json env = json::array();
    const SmoothTestFunction f = default_test_function(m, 1.0);
    for (double eps : {0.05, 0.5, 0.95}) {
      const IsaacsEnvelopeReport r = isaacs_envelope_check(game, f, eps, m.containment, grid);
      env.push_back({{"eps", eps}, {"max_residual", r.max_residual}, {"composite", r.composite},
                     {"condition_holds", r.condition_holds}});
    }
    result["envelope"] = env;
    write_manifest(s, m, "isaacs-check", result);
  }
  const std::string path = output_path(s, a.out, "isaacs.json");
  write_text(path, result.dump(2) + "\n");
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

json curve_values(const Scenario& s, const Model& m, const Curve& c) {
  json j = {{"horizon", c.horizon()}, {"action", action_cost(m.hamiltonian, c, c.horizon(), m.conjugate)}};
  if (s.problem.type == "stationary") {
    DiscountOptions o;
    o.conjugate = m.conjugate;
    j["J"] = j_lambda(m.hamiltonian, c, s.problem.lambda, m.field, c.horizon(), o);
  } else {
    j["W"] = w_lambda(m.hamiltonian, c, c.horizon(), s.problem.lambda, m.field, m.conjugate);
  }
  return j;
}

int trace_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  const Model m = build_model(s);
  const SmoothTestFunction f =
      m.grid.is_torus()
          ? SmoothTestFunction::bump(m.grid.geometry(), s.trace.center, std::abs(s.trace.curvature),
                                     0.25 * (m.grid.upper()[0] - m.grid.lower()[0]))
          : SmoothTestFunction::quadratic(m.grid.geometry(), s.trace.center, s.trace.curvature);
  InclusionOptions o;
  o.conjugate = m.conjugate;
  const InclusionPath p = diff_inclusion_path(m.hamiltonian, f, m.grid.geometry(), s.trace.x0, s.trace.horizon,
                                              s.trace.step, o);
  const std::string path = output_path(s, a.out, "curve.csv");
  write_curve_csv(path, p.curve);
  json result = curve_values(s, m, p.curve);
  result["curve"] = path;
  result["young_residual"] = p.young_residual;
  result["endpoint"] = p.curve.points().back();
  write_manifest(s, m, "trace", result);
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int evaluate_cmd(const Args& a) {
  const Scenario s = load_scenario(a.scenario);
  const Model m = build_model(s);
  if (!a.curve.empty()) {
    const Curve c = read_curve_csv(a.curve, m.grid.geometry());
    const json result = curve_values(s, m, c);
    std::cout << result.dump(2) << "\n";
    return kExitOk;
  }
  if (a.field.empty() || !a.spike_given) throw ConfigError("evaluate needs --curve, or --field with --inject-spike");
  const std::string path = output_path(s, a.out, "field_tampered.csv");
  std::size_t node = 0;
  if (s.problem.type == "stationary") {
    std::vector<double> values = read_field_csv(a.field, m.grid);
    node = a.node >= 0 ? static_cast<std::size_t>(a.node)
                       : static_cast<std::size_t>((a.spike >= 0 ? std::max_element(values.begin(), values.end())
                                                                : std::min_element(values.begin(), values.end())) -
                                                  values.begin());
    if (node >= values.size()) throw ConfigError("--node is out of range");
    values[node] += a.spike;
    write_field_csv(path, m.grid, values);
  } else {
    TimeFieldData data = read_time_field_csv(a.field, m.grid);
    // Spike the last layer, where the field is farthest from the initial datum.
    auto& layer = data.layers.back();
    node = a.node >= 0 ? static_cast<std::size_t>(a.node)
                       : static_cast<std::size_t>((a.spike >= 0 ? std::max_element(layer.begin(), layer.end())
                                                                : std::min_element(layer.begin(), layer.end())) -
                                                  layer.begin());
    if (node >= layer.size()) throw ConfigError("--node is out of range");
    layer[node] += a.spike;
    write_time_field_csv(path, m.grid, data.times, data.layers);
  }
  const json result = {{"field", path}, {"node", node}, {"spike", a.spike}};
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjcert: semi-Lagrangian Hamilton-Jacobi solver with discrete viscosity certificates"};
  app.require_subcommand(1);
  Args args;
  auto scenario_opt = [&](CLI::App* sub) {
    sub->add_option("-s,--scenario", args.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  };

  auto* ss = app.add_subcommand("solve-stationary", "solve the discounted stationary problem");
  scenario_opt(ss);
  ss->add_option("-o,--out", args.out, "field CSV (default <output.dir>/field.csv)");

  auto* se = app.add_subcommand("solve-evolution", "solve the evolutionary problem");
  scenario_opt(se);
  se->add_option("-o,--out", args.out, "space-time field CSV");

  auto* ce = app.add_subcommand("certify", "certify a field as a discrete viscosity sub/supersolution");
  scenario_opt(ce);
  ce->add_option("-f,--field", args.field, "field CSV")->required()->check(CLI::ExistingFile);
  ce->add_option("-r,--report", args.report, "report JSON (default <output.dir>/report.json)");

  auto* le = app.add_subcommand("legendre-table", "tabulate the conjugate at the grid centre");
  scenario_opt(le);
  le->add_option("-o,--out", args.out, "table CSV");

  auto* ps = app.add_subcommand("psi-table", "tabulate the sublinear domination function");
  scenario_opt(ps);
  ps->add_option("-o,--out", args.out, "table CSV");

  auto* is = app.add_subcommand("isaacs-check", "Isaacs gap, validity and envelope statistics");
  scenario_opt(is);
  is->add_option("-o,--out", args.out, "statistics JSON");
  is->add_option("-n,--samples", args.samples, "momentum samples per node")->check(CLI::PositiveNumber);

  auto* tr = app.add_subcommand("trace", "integrate the differential inclusion and write the curve");
  scenario_opt(tr);
  tr->add_option("-o,--out", args.out, "curve CSV");

  auto* ev = app.add_subcommand("evaluate", "evaluate a curve, or write a tampered field");
  scenario_opt(ev);
  ev->add_option("--curve", args.curve, "curve CSV")->check(CLI::ExistingFile);
  ev->add_option("--field", args.field, "field CSV")->check(CLI::ExistingFile);
  ev->add_option("--inject-spike", args.spike, "value added at one node");
  ev->add_option("--node", args.node, "node index for the spike (default: arg max / arg min)");
  ev->add_option("-o,--out", args.out, "tampered field CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }
  args.spike_given = ev->count("--inject-spike") > 0;

  try {
    if (*ss) return solve_stationary_cmd(args);
    if (*se) return solve_evolution_cmd(args);
    if (*ce) return certify_cmd(args);
    if (*le) return legendre_cmd(args);
    if (*ps) return psi_cmd(args);
    if (*is) return isaacs_cmd(args);
    if (*tr) return trace_cmd(args);
    if (*ev) return evaluate_cmd(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (last update " << format_double(e.last_update()) << ")\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
