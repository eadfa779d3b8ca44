#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjcert/containment.hpp"
#include "hjcert/grid.hpp"
#include "hjcert/hamiltonian.hpp"
#include "hjcert/isaacs.hpp"
#include "hjcert/value.hpp"
#include "hjcert/viscosity.hpp"

namespace hjcert {

using json = nlohmann::json;

/// Built-in scalar field expressions for h and u0.
struct FieldExpr {
  std::string kind = "constant";  // constant | sin | quadratic | table
  double value = 0.0;             // constant
  double amplitude = 1.0;         // sin: amplitude * sin(2 pi frequency x[axis])
  double frequency = 1.0;
  std::size_t axis = 0;
  Point center;                   // quadratic: offset + coeff |x - center|^2
  double coeff = 1.0;
  double offset = 0.0;
  std::vector<double> table;      // table: node values, interpolated between nodes
};

struct HamiltonianConfig {
  std::string variant = "quadratic";  // quadratic | transport-quadratic | norm | isaacs
  double coefficient = 1.0;
  double speed = 1.0;
  Vector drift_offset;
  std::vector<Vector> drift_matrix;
  double p_max = 4.0;
  bool numeric_conjugate = false;
  // isaacs
  std::vector<Strategy> theta1;
  std::vector<Strategy> theta2;
  std::string inner = "quadratic";  // quadratic | quadratic-drift
  std::string cost = "zero";        // zero | separable | bilinear
  double cost_weight = 1.0;
};

struct ContainmentConfig {
  std::string mode = "auto";  // auto | custom
  Point center;
  double c_upsilon = 0.0;
};

struct ProblemConfig {
  std::string type;  // stationary | evolutionary
  double lambda = 0.0;
  FieldExpr field;   // h (stationary) or u0 (evolutionary)
  double horizon = 0.0;
};

struct SchemeConfig {
  double tau = 0.01;
  std::string velocities = "stencil";  // stencil | uniform
  double v_ref = 1.0;
  double v_max = 2.0;
  std::size_t count = 41;
  double tol = 1e-8;
  std::size_t max_iters = 0;
};

struct CertifyConfig {
  std::size_t centers = 5;
  std::vector<double> curvatures{0.5, 2.0};
  std::vector<double> epsilons{0.05, 0.2};
  double radius_fraction = 0.25;
  double kappa = 5.0;
  int radius = 1;
  std::vector<TimeTest> time_tests{TimeTest{0.0, 0.0}, TimeTest{1.0, 0.0}, TimeTest{-1.0, 0.0}};
  /// dpp residual horizon; 0 selects 5 tau.
  double dpp_horizon = 0.0;
};

struct LegendreConfig {
  double dp = 0.0;
  bool refine = true;
  double v_max = 2.0;
  std::size_t v_count = 41;
};

struct PsiConfig {
  double s_min = 1e-2;
  double s_max = 10.0;
  std::size_t table_size = 400;
  double v_max = 0.0;
  std::size_t directions_2d = 72;
  double curvature = 1.0;  // test function: quadratic bump curvature on the whole grid
};

struct TraceConfig {
  Point x0;
  double horizon = 1.0;
  double step = 1e-3;
  double curvature = -1.0;  // f = (curvature / 2)|x - center|^2
  Point center;
};

struct Scenario {
  DomainConfig domain;
  HamiltonianConfig hamiltonian;
  ContainmentConfig containment;
  ProblemConfig problem;
  SchemeConfig scheme;
  CertifyConfig certify;
  LegendreConfig legendre;
  PsiConfig psi;
  TraceConfig trace;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
};

/// Validates and converts; unknown keys and bad values raise ConfigError
/// carrying the JSON pointer of the offending entry (e.g. "/problem/lambda").
Scenario parse_scenario(const json& doc);
Scenario load_scenario(const std::string& path);
/// Normalised form with every default filled in; parse_scenario(to_json(s)) == s.
json to_json(const Scenario& s);

/// Objects derived from a scenario.
struct Model {
  DomainGrid grid;
  HamiltonianSpec hamiltonian;
  ContainmentSpec containment;
  ScalarFn field;
  std::optional<IsaacsSpec> game;
  VelocitySet velocities;
  ConjugateOptions conjugate;
  /// kappa * (max spacing + tau)
  double certificate_tol = 0.0;
};

Model build_model(const Scenario& s);
ScalarFn build_field(const FieldExpr& expr, const DomainGrid& grid);
IsaacsSpec build_game(const HamiltonianConfig& config, const DomainGrid& grid);

/// Run manifest: normalised scenario, derived quantities, library
/// constants and version strings. Contains no timestamps.
json manifest(const Scenario& s, const Model& m, const std::string& subcommand, const json& extra = json::object());

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hjcert
