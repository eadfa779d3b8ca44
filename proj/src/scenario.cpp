#include "hjcert/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "hjcert/errors.hpp"
#include "hjcert/io.hpp"
#include "hjcert/legendre.hpp"

namespace hjcert {

namespace {

// Reads one JSON object, remembers which keys were consumed and rejects the
// rest. Every error carries the pointer of the offending entry.
class Obj {
 public:
  Obj(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw ConfigError("expected an object", where());
  }

  std::string at(const std::string& key) const { return ptr_ + "/" + key; }
  std::string where() const { return ptr_.empty() ? "/" : ptr_; }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& need(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ConfigError("missing required key", at(key));
    return *v;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = fallback ? find(key) : &need(key);
    if (!v) return *fallback;
    return as_number(*v, at(key));
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    const json* v = fallback ? find(key) : &need(key);
    if (!v) return *fallback;
    return as_count(*v, at(key));
  }

  bool flag(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError("expected a boolean", at(key));
    return v->get<bool>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = fallback ? find(key) : &need(key);
    if (!v) return *fallback;
    if (!v->is_string()) throw ConfigError("expected a string", at(key));
    return v->get<std::string>();
  }

  Vector vector(const std::string& key, std::optional<Vector> fallback = std::nullopt) {
    const json* v = fallback ? find(key) : &need(key);
    if (!v) return *fallback;
    return as_vector(*v, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown key", at(it.key()));
    }
  }

  static double as_number(const json& v, const std::string& ptr) {
    if (!v.is_number()) throw ConfigError("expected a number", ptr);
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("expected a finite number", ptr);
    return x;
  }

  static std::size_t as_count(const json& v, const std::string& ptr) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("expected a nonnegative integer", ptr);
    return v.get<std::size_t>();
  }

  static Vector as_vector(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw ConfigError("expected an array of numbers", ptr);
    Vector out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], ptr + "/" + std::to_string(k)));
    return out;
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& what, const std::string& ptr) {
  if (!ok) throw ConfigError(what, ptr);
}

std::vector<Vector> vector_list(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError("expected an array of arrays", ptr);
  std::vector<Vector> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(Obj::as_vector(v[k], ptr + "/" + std::to_string(k)));
  return out;
}

DomainConfig parse_domain(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  DomainConfig d;
  const std::string kind = o.text("kind");
  require(kind == "box" || kind == "torus", "kind must be 'box' or 'torus'", o.at("kind"));
  d.kind = kind == "box" ? DomainKind::box : DomainKind::torus;
  d.lower = o.vector("lower");
  d.upper = o.vector("upper");
  require(!d.lower.empty() && d.lower.size() <= 3, "dimension must be 1, 2 or 3", o.at("lower"));
  require(d.upper.size() == d.lower.size(), "lower and upper differ in dimension", o.at("upper"));
  for (std::size_t a = 0; a < d.lower.size(); ++a) {
    require(d.lower[a] < d.upper[a], "upper must exceed lower on every axis", o.at("upper") + "/" + std::to_string(a));
  }
  const json& nodes = o.need("nodes");
  if (nodes.is_array()) {
    for (std::size_t k = 0; k < nodes.size(); ++k) d.nodes.push_back(Obj::as_count(nodes[k], o.at("nodes") + "/" + std::to_string(k)));
  } else {
    d.nodes.assign(d.lower.size(), Obj::as_count(nodes, o.at("nodes")));
  }
  require(d.nodes.size() == d.lower.size(), "one node count per axis expected", o.at("nodes"));
  for (std::size_t n : d.nodes) require(n >= 3, "at least 3 nodes per axis", o.at("nodes"));
  d.max_total_nodes = o.count("max_total_nodes", d.max_total_nodes);
  o.finish();
  return d;
}

HamiltonianConfig parse_hamiltonian(const json& j, const std::string& ptr, std::size_t dim) {
  Obj o(j, ptr);
  HamiltonianConfig h;
  h.variant = o.text("variant");
  h.p_max = o.number("p_max", h.p_max);
  require(h.p_max > 0.0, "p_max must be positive", o.at("p_max"));
  h.numeric_conjugate = o.flag("numeric_conjugate", false);
  if (h.variant == "quadratic") {
    h.coefficient = o.number("coefficient", 1.0);
    require(h.coefficient > 0.0, "coefficient must be positive", o.at("coefficient"));
  } else if (h.variant == "transport-quadratic") {
    h.drift_offset = o.vector("drift_offset", Vector(dim, 0.0));
    require(h.drift_offset.size() == dim, "drift_offset has wrong dimension", o.at("drift_offset"));
    if (const json* m = o.find("drift_matrix")) {
      h.drift_matrix = vector_list(*m, o.at("drift_matrix"));
      require(h.drift_matrix.empty() || h.drift_matrix.size() == dim, "drift_matrix needs one row per axis",
              o.at("drift_matrix"));
      for (const auto& row : h.drift_matrix) require(row.size() == dim, "drift_matrix row has wrong length", o.at("drift_matrix"));
    }
  } else if (h.variant == "norm") {
    h.speed = o.number("speed", 1.0);
    require(h.speed > 0.0, "speed must be positive", o.at("speed"));
  } else if (h.variant == "isaacs") {
    h.theta1 = vector_list(o.need("theta1"), o.at("theta1"));
    h.theta2 = vector_list(o.need("theta2"), o.at("theta2"));
    require(!h.theta1.empty(), "strategy set must be nonempty", o.at("theta1"));
    require(!h.theta2.empty(), "strategy set must be nonempty", o.at("theta2"));
    Obj inner(o.need("inner"), o.at("inner"));
    h.inner = inner.text("kind");
    require(h.inner == "quadratic" || h.inner == "quadratic-drift", "inner kind must be 'quadratic' or 'quadratic-drift'",
            inner.at("kind"));
    inner.finish();
    Obj cost(o.need("cost"), o.at("cost"));
    h.cost = cost.text("kind");
    require(h.cost == "zero" || h.cost == "separable" || h.cost == "bilinear",
            "cost kind must be 'zero', 'separable' or 'bilinear'", cost.at("kind"));
    h.cost_weight = cost.number("weight", 1.0);
    cost.finish();
    std::size_t need = h.inner == "quadratic-drift" ? dim : 0;
    if (h.cost != "zero") need = std::max<std::size_t>(need + (h.cost == "separable" ? 1 : 0), 1);
    for (const auto* set : {&h.theta1, &h.theta2}) {
      const std::string key = set == &h.theta1 ? "theta1" : "theta2";
      for (std::size_t k = 0; k < set->size(); ++k) {
        require((*set)[k].size() >= need, "strategy has too few entries", o.at(key) + "/" + std::to_string(k));
      }
    }
  } else {
    throw ConfigError("variant must be quadratic, transport-quadratic, norm or isaacs", o.at("variant"));
  }
  o.finish();
  return h;
}

ContainmentConfig parse_containment(const json& j, const std::string& ptr, std::size_t dim) {
  Obj o(j, ptr);
  ContainmentConfig c;
  c.mode = o.text("mode", "auto");
  if (c.mode == "custom") {
    c.center = o.vector("center");
    require(c.center.size() == dim, "center has wrong dimension", o.at("center"));
    c.c_upsilon = o.number("c_upsilon");
    require(c.c_upsilon >= 0.0, "c_upsilon must be nonnegative", o.at("c_upsilon"));
  } else {
    require(c.mode == "auto", "mode must be 'auto' or 'custom'", o.at("mode"));
  }
  o.finish();
  return c;
}

FieldExpr parse_field(const json& j, const std::string& ptr, const DomainConfig& domain) {
  Obj o(j, ptr);
  FieldExpr f;
  const std::size_t dim = domain.lower.size();
  f.kind = o.text("kind");
  if (f.kind == "constant") {
    f.value = o.number("value");
  } else if (f.kind == "sin") {
    f.amplitude = o.number("amplitude", 1.0);
    f.frequency = o.number("frequency", 1.0);
    f.axis = o.count("axis", 0);
    require(f.axis < dim, "axis out of range", o.at("axis"));
  } else if (f.kind == "quadratic") {
    f.center = o.vector("center", Point(dim, 0.0));
    require(f.center.size() == dim, "center has wrong dimension", o.at("center"));
    f.coeff = o.number("coeff", 1.0);
    f.offset = o.number("offset", 0.0);
  } else if (f.kind == "table") {
    f.table = o.vector("values");
    std::size_t total = 1;
    for (std::size_t n : domain.nodes) total *= n;
    require(f.table.size() == total, "table needs one value per grid node", o.at("values"));
  } else {
    throw ConfigError("kind must be constant, sin, quadratic or table", o.at("kind"));
  }
  o.finish();
  return f;
}

ProblemConfig parse_problem(const json& j, const std::string& ptr, const DomainConfig& domain) {
  Obj o(j, ptr);
  ProblemConfig p;
  p.type = o.text("type");
  p.lambda = o.number("lambda");
  if (p.type == "stationary") {
    require(p.lambda > 0.0, "lambda must be positive for stationary problems", o.at("lambda"));
    p.field = parse_field(o.need("h"), o.at("h"), domain);
  } else if (p.type == "evolutionary") {
    require(p.lambda >= 0.0, "lambda must be nonnegative", o.at("lambda"));
    p.field = parse_field(o.need("u0"), o.at("u0"), domain);
    p.horizon = o.number("T");
    require(p.horizon > 0.0, "T must be positive", o.at("T"));
  } else {
    throw ConfigError("type must be 'stationary' or 'evolutionary'", o.at("type"));
  }
  o.finish();
  return p;
}

SchemeConfig parse_scheme(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  SchemeConfig s;
  s.tau = o.number("tau", s.tau);
  require(s.tau > 0.0, "tau must be positive", o.at("tau"));
  s.tol = o.number("tol", s.tol);
  require(s.tol > 0.0, "tol must be positive", o.at("tol"));
  s.max_iters = o.count("max_iters", 0);
  if (const json* v = o.find("velocities")) {
    Obj vo(*v, o.at("velocities"));
    s.velocities = vo.text("kind");
    if (s.velocities == "stencil") {
      s.v_ref = vo.number("v_ref", s.v_ref);
      require(s.v_ref > 0.0, "v_ref must be positive", vo.at("v_ref"));
    } else if (s.velocities == "uniform") {
      s.v_max = vo.number("v_max", s.v_max);
      require(s.v_max > 0.0, "v_max must be positive", vo.at("v_max"));
      s.count = vo.count("count", s.count);
      require(s.count >= 1, "count must be positive", vo.at("count"));
    } else {
      throw ConfigError("kind must be 'stencil' or 'uniform'", vo.at("kind"));
    }
    vo.finish();
  }
  o.finish();
  return s;
}

CertifyConfig parse_certify(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  CertifyConfig c;
  c.centers = o.count("centers", c.centers);
  require(c.centers >= 1, "centers must be positive", o.at("centers"));
  c.curvatures = o.vector("curvatures", c.curvatures);
  require(!c.curvatures.empty(), "curvatures must be nonempty", o.at("curvatures"));
  for (double b : c.curvatures) require(b > 0.0, "curvatures must be positive", o.at("curvatures"));
  c.epsilons = o.vector("epsilons", c.epsilons);
  require(!c.epsilons.empty(), "epsilons must be nonempty", o.at("epsilons"));
  for (double e : c.epsilons) require(e > 0.0 && e < 1.0, "epsilons must lie in (0, 1)", o.at("epsilons"));
  c.radius_fraction = o.number("radius_fraction", c.radius_fraction);
  require(c.radius_fraction > 0.0 && c.radius_fraction < 0.5, "radius_fraction must lie in (0, 0.5)",
          o.at("radius_fraction"));
  c.kappa = o.number("kappa", c.kappa);
  require(c.kappa >= 1.0, "kappa must be at least 1", o.at("kappa"));
  c.radius = static_cast<int>(o.count("radius", 1));
  c.dpp_horizon = o.number("dpp_horizon", 0.0);
  require(c.dpp_horizon >= 0.0, "dpp_horizon must be nonnegative", o.at("dpp_horizon"));
  if (const json* t = o.find("time_tests")) {
    require(t->is_array() && !t->empty(), "time_tests must be a nonempty array", o.at("time_tests"));
    c.time_tests.clear();
    for (std::size_t k = 0; k < t->size(); ++k) {
      Obj to((*t)[k], o.at("time_tests") + "/" + std::to_string(k));
      c.time_tests.push_back({to.number("alpha", 0.0), to.number("beta", 0.0)});
      to.finish();
    }
  }
  o.finish();
  return c;
}

LegendreConfig parse_legendre(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  LegendreConfig l;
  l.dp = o.number("dp", 0.0);
  require(l.dp >= 0.0, "dp must be nonnegative", o.at("dp"));
  l.refine = o.flag("refine", true);
  l.v_max = o.number("v_max", l.v_max);
  require(l.v_max > 0.0, "v_max must be positive", o.at("v_max"));
  l.v_count = o.count("v_count", l.v_count);
  require(l.v_count >= 1, "v_count must be positive", o.at("v_count"));
  o.finish();
  return l;
}

PsiConfig parse_psi(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  PsiConfig p;
  p.s_min = o.number("s_min", p.s_min);
  p.s_max = o.number("s_max", p.s_max);
  require(p.s_min > 0.0 && p.s_min < p.s_max, "need 0 < s_min < s_max", o.at("s_min"));
  p.table_size = o.count("table_size", p.table_size);
  require(p.table_size >= 2, "table_size must be at least 2", o.at("table_size"));
  p.v_max = o.number("v_max", 0.0);
  require(p.v_max >= 0.0, "v_max must be nonnegative", o.at("v_max"));
  p.directions_2d = o.count("directions_2d", p.directions_2d);
  p.curvature = o.number("curvature", p.curvature);
  o.finish();
  return p;
}

TraceConfig parse_trace(const json& j, const std::string& ptr, std::size_t dim) {
  Obj o(j, ptr);
  TraceConfig t;
  t.x0 = o.vector("x0");
  require(t.x0.size() == dim, "x0 has wrong dimension", o.at("x0"));
  t.horizon = o.number("T", t.horizon);
  require(t.horizon > 0.0, "T must be positive", o.at("T"));
  t.step = o.number("step", t.step);
  require(t.step > 0.0, "step must be positive", o.at("step"));
  t.curvature = o.number("curvature", t.curvature);
  t.center = o.vector("center", Point(dim, 0.0));
  require(t.center.size() == dim, "center has wrong dimension", o.at("center"));
  o.finish();
  return t;
}

json field_json(const FieldExpr& f) {
  if (f.kind == "constant") return {{"kind", f.kind}, {"value", f.value}};
  if (f.kind == "sin") return {{"kind", f.kind}, {"amplitude", f.amplitude}, {"frequency", f.frequency}, {"axis", f.axis}};
  if (f.kind == "quadratic") return {{"kind", f.kind}, {"center", f.center}, {"coeff", f.coeff}, {"offset", f.offset}};
  return {{"kind", f.kind}, {"values", f.table}};
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  Obj o(doc, "");
  Scenario s;
  s.domain = parse_domain(o.need("domain"), "/domain");
  const std::size_t dim = s.domain.lower.size();
  s.hamiltonian = parse_hamiltonian(o.need("hamiltonian"), "/hamiltonian", dim);
  if (const json* c = o.find("containment")) s.containment = parse_containment(*c, "/containment", dim);
  s.problem = parse_problem(o.need("problem"), "/problem", s.domain);
  if (const json* v = o.find("scheme")) s.scheme = parse_scheme(*v, "/scheme");
  if (const json* v = o.find("certify")) s.certify = parse_certify(*v, "/certify");
  if (const json* v = o.find("legendre")) s.legendre = parse_legendre(*v, "/legendre");
  if (const json* v = o.find("psi")) s.psi = parse_psi(*v, "/psi");
  if (const json* v = o.find("trace")) {
    s.trace = parse_trace(*v, "/trace", dim);
  } else {
    s.trace.x0.assign(dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a) s.trace.x0[a] = 0.5 * (s.domain.lower[a] + s.domain.upper[a]);
    s.trace.center.assign(dim, 0.0);
  }
  if (const json* v = o.find("output")) {
    Obj out(*v, "/output");
    s.output_dir = out.text("dir", ".");
    out.finish();
  }
  if (const json* v = o.find("seed")) s.seed = Obj::as_count(*v, "/seed");
  o.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "/");
  }
  return parse_scenario(doc);
}

json to_json(const Scenario& s) {
  json j;
  j["domain"] = {{"kind", s.domain.kind == DomainKind::box ? "box" : "torus"},
                 {"lower", s.domain.lower},
                 {"upper", s.domain.upper},
                 {"nodes", s.domain.nodes},
                 {"max_total_nodes", s.domain.max_total_nodes}};
  const HamiltonianConfig& h = s.hamiltonian;
  json hj = {{"variant", h.variant}, {"p_max", h.p_max}, {"numeric_conjugate", h.numeric_conjugate}};
  if (h.variant == "quadratic") hj["coefficient"] = h.coefficient;
  if (h.variant == "norm") hj["speed"] = h.speed;
  if (h.variant == "transport-quadratic") {
    hj["drift_offset"] = h.drift_offset;
    hj["drift_matrix"] = h.drift_matrix;
  }
  if (h.variant == "isaacs") {
    hj["theta1"] = h.theta1;
    hj["theta2"] = h.theta2;
    hj["inner"] = {{"kind", h.inner}};
    hj["cost"] = {{"kind", h.cost}, {"weight", h.cost_weight}};
  }
  j["hamiltonian"] = hj;
  j["containment"] = {{"mode", s.containment.mode}};
  if (s.containment.mode == "custom") {
    j["containment"]["center"] = s.containment.center;
    j["containment"]["c_upsilon"] = s.containment.c_upsilon;
  }
  json pj = {{"type", s.problem.type}, {"lambda", s.problem.lambda}};
  if (s.problem.type == "stationary") {
    pj["h"] = field_json(s.problem.field);
  } else {
    pj["u0"] = field_json(s.problem.field);
    pj["T"] = s.problem.horizon;
  }
  j["problem"] = pj;
  json vj = {{"kind", s.scheme.velocities}};
  if (s.scheme.velocities == "stencil") {
    vj["v_ref"] = s.scheme.v_ref;
  } else {
    vj["v_max"] = s.scheme.v_max;
    vj["count"] = s.scheme.count;
  }
  j["scheme"] = {{"tau", s.scheme.tau}, {"tol", s.scheme.tol}, {"max_iters", s.scheme.max_iters}, {"velocities", vj}};
  json tt = json::array();
  for (const auto& t : s.certify.time_tests) tt.push_back({{"alpha", t.alpha}, {"beta", t.beta}});
  j["certify"] = {{"centers", s.certify.centers},     {"curvatures", s.certify.curvatures},
                  {"epsilons", s.certify.epsilons},   {"radius_fraction", s.certify.radius_fraction},
                  {"kappa", s.certify.kappa},         {"radius", s.certify.radius},
                  {"dpp_horizon", s.certify.dpp_horizon}, {"time_tests", tt}};
  j["legendre"] = {{"dp", s.legendre.dp}, {"refine", s.legendre.refine}, {"v_max", s.legendre.v_max},
                   {"v_count", s.legendre.v_count}};
  j["psi"] = {{"s_min", s.psi.s_min},         {"s_max", s.psi.s_max},
              {"table_size", s.psi.table_size}, {"v_max", s.psi.v_max},
              {"directions_2d", s.psi.directions_2d}, {"curvature", s.psi.curvature}};
  j["trace"] = {{"x0", s.trace.x0}, {"T", s.trace.horizon}, {"step", s.trace.step},
                {"curvature", s.trace.curvature}, {"center", s.trace.center}};
  j["output"] = {{"dir", s.output_dir}};
  j["seed"] = s.seed;
  return j;
}

ScalarFn build_field(const FieldExpr& expr, const DomainGrid& grid) {
  if (expr.kind == "constant") {
    const double c = expr.value;
    return [c](const Point&) { return c; };
  }
  if (expr.kind == "sin") {
    const double a = expr.amplitude;
    const double k = 2.0 * std::numbers::pi * expr.frequency;
    const std::size_t axis = expr.axis;
    return [a, k, axis](const Point& x) { return a * std::sin(k * x[axis]); };
  }
  if (expr.kind == "quadratic") {
    const Geometry g = grid.geometry();
    const FieldExpr e = expr;
    return [g, e](const Point& x) {
      const Vector d = g.displacement(e.center, x);
      return e.offset + e.coeff * dot(d, d);
    };
  }
  if (expr.kind == "table") {
    if (expr.table.size() != grid.size()) throw ConfigError("table needs one value per grid node");
    const DomainGrid g = grid;
    const std::vector<double> values = expr.table;
    return [g, values](const Point& x) { return g.interpolate(values, x); };
  }
  throw ConfigError("unknown field kind '" + expr.kind + "'");
}

IsaacsSpec build_game(const HamiltonianConfig& config, const DomainGrid& grid) {
  const std::size_t d = grid.dimension();
  IsaacsSpec spec;
  spec.theta1 = config.theta1;
  spec.theta2 = config.theta2;
  const HamiltonianSpec q = quadratic_hamiltonian(grid, 1.0, config.p_max);
  for (const auto& a : config.theta1) {
    std::vector<HamiltonianSpec> row;
    for (const auto& b : config.theta2) {
      if (config.inner == "quadratic") {
        row.push_back(q);
      } else {
        AffineDrift drift;
        drift.offset = Vector(d);
        for (std::size_t k = 0; k < d; ++k) drift.offset[k] = a[k] + b[k];
        row.push_back(transport_quadratic_hamiltonian(grid, drift, config.p_max));
      }
    }
    spec.inner.push_back(std::move(row));
  }
  if (config.cost == "zero") {
    spec.cost = [](const Point&, const Strategy&, const Strategy&) { return 0.0; };
    spec.separable = true;
  } else if (config.cost == "separable") {
    spec.cost = [](const Point&, const Strategy& a, const Strategy& b) { return a.back() + b.back(); };
    spec.separable = true;
  } else {
    const double w = config.cost_weight;
    spec.cost = [w](const Point&, const Strategy& a, const Strategy& b) { return w * a[0] * b[0]; };
  }
  spec.description = "isaacs (" + config.inner + " inner, " + config.cost + " cost)";
  return spec;
}

namespace {

HamiltonianSpec build_hamiltonian(const HamiltonianConfig& c, const DomainGrid& grid,
                                  std::optional<IsaacsSpec>& game) {
  if (c.variant == "quadratic") return quadratic_hamiltonian(grid, c.coefficient, c.p_max);
  if (c.variant == "norm") return norm_hamiltonian(grid, c.speed, c.p_max);
  if (c.variant == "transport-quadratic") {
    return transport_quadratic_hamiltonian(grid, AffineDrift{c.drift_offset, c.drift_matrix}, c.p_max);
  }
  game = build_game(c, grid);
  const IsaacsValidity validity = validate_isaacs(*game, grid);
  if (!validity.valid()) {
    throw ConfigError("game violates the standing assumptions: " + validity.messages.front(), "/hamiltonian");
  }
  try {
    return isaacs_hamiltonian(*game, grid);
  } catch (const ConstructionError& e) {
    // The composite vanishes at p = 0 only when inf_1 sup_2 I = 0.
    throw ConfigError(std::string("composite Hamiltonian: ") + e.what(), "/hamiltonian");
  }
}

}  // namespace

Model build_model(const Scenario& s) {
  DomainGrid grid = DomainGrid::build(s.domain);
  std::optional<IsaacsSpec> game;
  HamiltonianSpec h = build_hamiltonian(s.hamiltonian, grid, game);
  if (s.hamiltonian.numeric_conjugate) h = without_conjugate(h, grid);
  ContainmentSpec u = [&] {
    if (s.containment.mode == "custom") {
      ContainmentSpec c = custom_containment(grid, h, s.containment.center, s.containment.c_upsilon);
      if (!c.certified()) throw ConfigError("c_upsilon is below the grid supremum of H(x, dU)", "/containment/c_upsilon");
      return c;
    }
    return standard_containment(grid, h);
  }();
  ScalarFn field = build_field(s.problem.field, grid);
  VelocitySet velocities = s.scheme.velocities == "stencil"
                               ? stencil_velocities(grid.dimension(), s.scheme.v_ref)
                               : uniform_velocities(grid.dimension(), s.scheme.v_max, s.scheme.count);
  ConjugateOptions conj;
  conj.dp = s.legendre.dp;
  conj.refine = s.legendre.refine;
  const double tol = s.certify.kappa * (grid.max_spacing() + s.scheme.tau);
  return Model{std::move(grid), std::move(h), std::move(u), std::move(field), std::move(game),
               std::move(velocities), conj, tol};
}

json manifest(const Scenario& s, const Model& m, const std::string& subcommand, const json& extra) {
  json j;
  j["tool"] = "hjcert";
  j["version"] = kVersion;
  j["compiler"] = __VERSION__;
  j["subcommand"] = subcommand;
  j["scenario"] = to_json(s);
  j["derived"] = {{"nodes", m.grid.size()},
                  {"spacing", m.grid.spacing()},
                  {"max_spacing", m.grid.max_spacing()},
                  {"hamiltonian", m.hamiltonian.description()},
                  {"variant", to_string(m.hamiltonian.variant())},
                  {"analytic_conjugate", m.hamiltonian.has_conjugate()},
                  {"containment_kind", m.containment.kind()},
                  {"c_upsilon", m.containment.constant()},
                  {"velocity_count", m.velocities.velocities.size()},
                  {"velocity_set", m.velocities.description},
                  {"certificate_tol", m.certificate_tol}};
  if (s.problem.type == "stationary") {
    const double beta = std::exp(-s.scheme.tau / s.problem.lambda);
    j["derived"]["beta"] = beta;
  }
  j["constants"] = {{"containment_margin", kContainmentMargin},
                    {"zero_momentum_tolerance", kZeroMomentumTolerance},
                    {"grid_conjugate_tolerance", kGridConjugateTolerance},
                    {"analytic_conjugate_tolerance", kAnalyticConjugateTolerance},
                    {"isaacs_tolerance", kIsaacsTolerance},
                    {"discount_substeps_per_lambda", DiscountOptions{}.substeps_per_lambda},
                    {"inclusion_residual_constant", InclusionOptions{}.residual_constant}};
  j["result"] = extra;
  return j;
}

}  // namespace hjcert
