#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace magflow::app {
namespace {

using nlohmann::json;

// Walks a JSON object while remembering where it is, so errors name the field.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : value_.items()) {
      if (!keys.contains(k)) child_path_fail(k, "unknown key");
    }
  }

  bool has(const std::string& key) const { return value_.contains(key); }

  Node at(const std::string& key) const {
    if (!value_.contains(key)) child_path_fail(key, "missing required field");
    return Node(value_.at(key), join(key));
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  std::vector<double> numbers() const {
    if (!value_.is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.push_back(Node(value_[i], path_ + "[" + std::to_string(i) + "]").number());
    }
    return out;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void child_path_fail(const std::string& key, const std::string& what) const {
    throw ConfigError(join(key), what);
  }

  const json& value_;
  std::string path_;
};

Element seed_from_spectrum(const Node& node, Family family, int n) {
  const std::vector<double> s = node.numbers();
  Matrix m = Matrix::Zero(n, n);
  if (family == Family::SpecialUnitary) {
    if (static_cast<int>(s.size()) != n) node.fail("su(" + std::to_string(n) + ") needs " + std::to_string(n) + " values");
    double sum = 0.0, scale = 1.0;
    for (double v : s) {
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(sum) > 1e-12 * scale) node.fail("values must sum to zero (trace-free)");
    for (int i = 0; i < n; ++i) m(i, i) = Complex(0.0, s[static_cast<std::size_t>(i)]);
  } else {
    if (static_cast<int>(s.size()) != n / 2) {
      node.fail("so(" + std::to_string(n) + ") needs " + std::to_string(n / 2) + " rotation angles");
    }
    for (int r = 0; r < n / 2; ++r) {
      m(2 * r + 1, 2 * r) = s[static_cast<std::size_t>(r)];
      m(2 * r, 2 * r + 1) = -s[static_cast<std::size_t>(r)];
    }
  }
  return Element(m);
}

Element parse_seed(const Node& node, const Algebra& alg) {
  node.require_object({"spectrum", "coords"});
  if (node.has("spectrum") == node.has("coords")) node.fail("give exactly one of spectrum, coords");
  if (node.has("spectrum")) return seed_from_spectrum(node.at("spectrum"), alg.family(), alg.n());
  const Node c = node.at("coords");
  const std::vector<double> v = c.numbers();
  if (static_cast<int>(v.size()) != alg.dim()) c.fail("expected " + std::to_string(alg.dim()) + " coordinates");
  return alg.from_coords(Eigen::Map<const Coords>(v.data(), static_cast<Eigen::Index>(v.size())));
}

void parse_integrator(const Node& node, IntegratorSettings& s) {
  node.require_object({"method", "dt", "t_end", "project_every", "projection_tolerance"});
  if (node.has("method")) {
    const Node m = node.at("method");
    const std::string name = m.string();
    if (name == "rk4_projected") {
      s.method = IntegratorMethod::RungeKutta4Projected;
    } else if (name == "conjugation_splitting") {
      s.method = IntegratorMethod::ConjugationSplitting;
    } else {
      m.fail("expected rk4_projected or conjugation_splitting, got '" + name + "'");
    }
  }
  if (node.has("dt")) {
    const Node d = node.at("dt");
    s.dt = d.number();
    if (s.dt <= 0.0) d.fail("must be positive");
  }
  if (node.has("t_end")) {
    const Node t = node.at("t_end");
    s.t_end = t.number();
    if (s.t_end < 0.0) t.fail("must be non-negative");
  }
  if (node.has("project_every")) {
    const Node p = node.at("project_every");
    const long long v = p.integer();
    if (v < 0 || v > 1'000'000'000) p.fail("must be a non-negative integer");
    s.project_every = static_cast<int>(v);
  }
  if (node.has("projection_tolerance")) {
    const Node p = node.at("projection_tolerance");
    s.projection_tolerance = p.number();
    if (s.projection_tolerance <= 0.0) p.fail("must be positive");
  }
}

}  // namespace

FaultInjection parse_fault(const std::string& name) {
  if (name.empty() || name == "none") return FaultInjection::None;
  if (name == "flip-magnetic-sign") return FaultInjection::FlipMagneticSign;
  throw ConfigError("--fault-inject", "unknown fault '" + name + "' (known: none, flip-magnetic-sign)");
}

std::string fault_name(FaultInjection fault) {
  return fault == FaultInjection::FlipMagneticSign ? "flip-magnetic-sign" : "none";
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ..."
    throw ConfigError("", e.what());
  }
  const Node root(doc, "");
  root.require_object({"algebra", "seed_a", "metric", "epsilon", "initial_x", "initial_p", "integrator",
                       "outputs", "rng_seed", "verify"});
  ExperimentConfig c;

  const Node alg = root.at("algebra");
  alg.require_object({"family", "n"});
  const Node fam = alg.at("family");
  const std::string family = fam.string();
  if (family == "su") {
    c.family = Family::SpecialUnitary;
  } else if (family == "so") {
    c.family = Family::SpecialOrthogonal;
  } else {
    fam.fail("expected \"su\" or \"so\", got '" + family + "'");
  }
  const Node n = alg.at("n");
  const long long nv = n.integer();
  const long long n_min = c.family == Family::SpecialUnitary ? 2 : 3;
  if (nv < n_min || nv > 12) n.fail("must be between " + std::to_string(n_min) + " and 12");
  c.n = static_cast<int>(nv);

  c.seed_a = parse_seed(root.at("seed_a"), c.algebra());

  if (root.has("metric")) {
    const Node m = root.at("metric");
    m.require_object({"kind", "b_spectral"});
    const Node kind = m.at("kind");
    const std::string k = kind.string();
    if (k == "normal") {
      if (m.has("b_spectral")) m.at("b_spectral").fail("only valid for the sectional metric");
      c.metric = MetricSpec::normal();
    } else if (k == "sectional") {
      c.metric = MetricSpec::sectional(m.at("b_spectral").numbers());
    } else {
      kind.fail("expected normal or sectional, got '" + k + "'");
    }
  }

  if (root.has("epsilon")) {
    const Node e = root.at("epsilon");
    if (e.value().is_array()) {
      c.epsilons = e.numbers();
      c.epsilon_is_list = true;
      if (c.epsilons.empty()) e.fail("needs at least one value");
    } else {
      c.epsilons = {e.number()};
    }
  }

  if (root.has("initial_x")) {
    const Node x = root.at("initial_x");
    const std::string v = x.string();
    if (v == "seed") {
      c.initial_x = InitialX::Seed;
    } else if (v == "random") {
      c.initial_x = InitialX::Random;
    } else {
      x.fail("expected seed or random, got '" + v + "'");
    }
  }

  if (root.has("initial_p")) {
    const Node p = root.at("initial_p");
    p.require_object({"coords", "scale"});
    if (p.has("coords") == p.has("scale")) p.fail("give exactly one of coords, scale");
    if (p.has("coords")) {
      const Node cn = p.at("coords");
      c.initial_p_coords = cn.numbers();
      if (static_cast<int>(c.initial_p_coords->size()) != c.algebra().dim()) {
        cn.fail("expected " + std::to_string(c.algebra().dim()) + " coordinates");
      }
    } else {
      const Node s = p.at("scale");
      c.initial_p_scale = s.number();
      if (c.initial_p_scale < 0.0) s.fail("must be non-negative");
    }
  }

  if (root.has("integrator")) parse_integrator(root.at("integrator"), c.integrator);

  if (root.has("outputs")) {
    const Node o = root.at("outputs");
    o.require_object({"csv", "json", "subsample", "record_runtime"});
    if (o.has("csv")) c.outputs.csv = o.at("csv").boolean();
    if (o.has("json")) c.outputs.json = o.at("json").boolean();
    if (o.has("record_runtime")) c.outputs.record_runtime = o.at("record_runtime").boolean();
    if (o.has("subsample")) {
      const Node s = o.at("subsample");
      const long long v = s.integer();
      if (v < 1 || v > 1'000'000'000) s.fail("must be a positive integer");
      c.outputs.subsample = static_cast<int>(v);
    }
  }

  if (root.has("rng_seed")) {
    const Node s = root.at("rng_seed");
    const long long v = s.integer();
    if (v < 0) s.fail("must be non-negative");
    c.rng_seed = static_cast<std::uint64_t>(v);
  }

  if (root.has("verify")) {
    const Node v = root.at("verify");
    v.require_object({"checks", "samples"});
    if (v.has("checks")) {
      const Node list = v.at("checks");
      if (!list.value().is_array()) list.fail("expected an array of check names");
      std::vector<std::string> names;
      for (std::size_t i = 0; i < list.value().size(); ++i) {
        names.push_back(Node(list.value()[i], list.path() + "[" + std::to_string(i) + "]").string());
      }
      c.verify.checks = std::move(names);
    }
    if (v.has("samples")) {
      const Node s = v.at("samples");
      const long long k = s.integer();
      if (k < 1 || k > 100000) s.fail("must be between 1 and 100000");
      c.verify.samples = static_cast<int>(k);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + (e.where().empty() ? "" : ": " + e.where()),
                      std::string(e.what()).substr(e.where().empty() ? 0 : e.where().size() + 2));
  }
}

OrbitContext make_context(const ExperimentConfig& config) {
  try {
    OrbitContext ctx(config.algebra(), config.seed_a);
    validate_metric(ctx, config.metric);
    return ctx;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("seed_a/metric", e.what());
  }
}

PhasePoint make_initial_point(const ExperimentConfig& config, const OrbitContext& ctx) {
  const Algebra& alg = ctx.algebra();
  PhasePoint pt;
  pt.x = config.initial_x == InitialX::Seed
             ? ctx.seed()
             : adjoint_action(random_group_element(alg, config.rng_seed), ctx.seed());
  if (config.initial_p_coords) {
    const auto& v = *config.initial_p_coords;
    pt.p = alg.from_coords(Eigen::Map<const Coords>(v.data(), static_cast<Eigen::Index>(v.size())));
    if (project_ann(ctx, pt.x, pt.p).norm() > 1e-9 * std::max(1.0, pt.p.norm())) {
      throw ConfigError("initial_p.coords", "p must be orthogonal to the annihilator of x");
    }
  } else {
    const Element raw = random_element(alg, config.rng_seed + 1);
    const Element tangent = project_ann_perp(ctx, pt.x, raw);
    pt.p = tangent.norm() > 0.0 ? (config.initial_p_scale / tangent.norm()) * tangent : tangent;
  }
  return pt;
}

FlowProblem make_problem(const ExperimentConfig& config, const OrbitContext& ctx, double eps) {
  FlowProblem problem{ctx, config.metric, eps, make_initial_point(config, ctx), config.integrator,
                      config.fault};
  try {
    validate(problem);
  } catch (const StepSizeUnderflow& e) {
    throw ConfigError("integrator.dt", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("integrator", e.what());
  }
  return problem;
}

}  // namespace magflow::app
