#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <json.hpp>

namespace magflow::app {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no NaN/inf; those become null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void write_json(const fs::path& path, const ordered_json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string status_name(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Complete: return "complete";
    case TrajectoryStatus::DegenerateOrbitPoint: return "degenerate_orbit_point";
    case TrajectoryStatus::ProjectionFailure: return "projection_failure";
  }
  return "unknown";
}

std::string method_name(IntegratorMethod m) {
  return m == IntegratorMethod::ConjugationSplitting ? "conjugation_splitting" : "rk4_projected";
}

bool is_sectional(const ExperimentConfig& c) { return c.metric.kind == MetricKind::Sectional; }

// ||Phi(t) - Phi(0)|| relative to ||Phi(0)||, absolute when that vanishes.
double momentum_norm_drift(const Element& phi0, const Element& phi) {
  const double d = (phi - phi0).norm();
  return phi0.norm() < 1e-12 ? d : d / phi0.norm();
}

ordered_json config_echo(const ExperimentConfig& c) {
  const Algebra alg = c.algebra();
  ordered_json j;
  j["algebra"] = alg.name();
  j["metric"] = is_sectional(c) ? "sectional" : "normal";
  if (is_sectional(c)) j["b_spectral"] = c.metric.b_spectral;
  const Coords seed = alg.coords(c.seed_a).array() + 0.0;  // no "-0.0" in the echo
  j["seed_a"] = std::vector<double>(seed.data(), seed.data() + seed.size());
  j["method"] = method_name(c.integrator.method);
  j["dt"] = c.integrator.dt;
  j["t_end"] = c.integrator.t_end;
  j["project_every"] = c.integrator.project_every;
  j["rng_seed"] = c.rng_seed;
  j["fault"] = fault_name(c.fault);
  return j;
}

}  // namespace

CaseResult run_case(const ExperimentConfig& config, const OrbitContext& ctx, double eps) {
  const auto t0 = std::chrono::steady_clock::now();
  const FlowProblem problem = make_problem(config, ctx, eps);
  CaseResult r;
  r.epsilon = eps;
  r.trajectory = integrate(problem);

  const QuantityRegistry reg = standard_quantities(ctx, config.metric, eps);
  const auto& qs = reg.quantities();
  r.report = conservation_report(r.trajectory, qs);
  r.energy_drift = r.report.worst(QuantityKind::Hamiltonian, qs);
  r.momentum_drift = r.report.worst(QuantityKind::MomentumComponent, qs);
  r.shift_drift = r.report.worst(QuantityKind::ShiftInvariant, qs);
  for (const auto& d : r.trajectory.diagnostics) {
    r.max_constraint_residual = std::max({r.max_constraint_residual, d.spectrum_drift, d.ann_residual});
  }

  double sum = 0.0;
  long count = 0;
  for (const PhasePoint& pt : r.trajectory.points) {
    const Element x_dot = flow_field(problem, pt).x_dot;
    if (x_dot.norm() < 1e-14) continue;
    try {
      sum += magnetic_force(ctx, pt.x, x_dot, eps).norm() / x_dot.norm();
      ++count;
    } catch (const DegenerateOrbitPoint&) {
    }
  }
  r.curvature_proxy = count > 0 ? sum / static_cast<double>(count) : 0.0;

  try {
    r.delta = delta(ctx, problem.initial, eps);
  } catch (const std::exception&) {
    r.delta.reset();  // Phi_eps = 0 at a rest point with eps = 0
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void write_case(const ExperimentConfig& config, const OrbitContext& ctx, const CaseResult& r,
                const fs::path& dir) {
  fs::create_directories(dir);
  const Algebra& alg = ctx.algebra();
  const Trajectory& t = r.trajectory;

  if (config.outputs.csv) {
    std::ofstream csv(dir / "trajectory.csv");
    if (!csv) throw std::runtime_error("cannot write " + (dir / "trajectory.csv").string());
    csv << "t";
    for (int i = 1; i <= alg.dim(); ++i) csv << ",x" << i;
    for (int i = 1; i <= alg.dim(); ++i) csv << ",p" << i;
    csv << ",H,momentum_drift,constraint_residual\n";
    const Element phi0 = momentum_map(t.points.front(), r.epsilon);
    const std::size_t step = static_cast<std::size_t>(config.outputs.subsample);
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k % step != 0 && k + 1 != t.size()) continue;
      const PhasePoint& pt = t.points[k];
      const Coords xc = alg.coords(pt.x), pc = alg.coords(pt.p);
      csv << g17(t.times[k]);
      for (Eigen::Index i = 0; i < xc.size(); ++i) csv << ',' << g17(xc(i));
      for (Eigen::Index i = 0; i < pc.size(); ++i) csv << ',' << g17(pc(i));
      csv << ',' << g17(hamiltonian(ctx, config.metric, pt)) << ','
          << g17(momentum_norm_drift(phi0, momentum_map(pt, r.epsilon))) << ','
          << g17(std::max(t.diagnostics[k].spectrum_drift, t.diagnostics[k].ann_residual)) << '\n';
    }
  }

  if (config.outputs.json) {
    ordered_json j;
    j["status"] = status_name(t.status);
    j["complete"] = t.complete();
    if (!t.complete()) j["error"] = t.error;
    j["epsilon"] = r.epsilon;
    j["config"] = config_echo(config);
    j["rows"] = t.size();
    j["t_final"] = t.times.back();
    j["energy_drift"] = num(r.energy_drift);
    j["momentum_drift"] = num(r.momentum_drift);
    j["shift_invariant_drift"] = num(r.shift_drift);
    j["max_constraint_residual"] = num(r.max_constraint_residual);
    j["curvature_proxy"] = num(r.curvature_proxy);
    j["delta"] = r.delta ? ordered_json(*r.delta) : ordered_json(nullptr);
    ordered_json drifts = ordered_json::array();
    for (const auto& d : r.report.entries) {
      drifts.push_back({{"name", d.name}, {"initial", num(d.initial)}, {"max_drift", num(d.max_drift)},
                        {"mean_drift", num(d.mean_drift)}, {"relative", d.relative}});
    }
    j["drifts"] = std::move(drifts);
    j["integrator_stats"] = {{"steps", t.stats.steps},
                             {"field_evaluations", t.stats.field_evaluations},
                             {"projections", t.stats.projections},
                             {"max_corrected_drift", num(t.stats.max_corrected_drift)}};
    if (config.outputs.record_runtime) j["runtime_seconds"] = r.runtime_seconds;
    write_json(dir / "summary.json", j);
  }
}

int cmd_simulate(const ExperimentConfig& config, const fs::path& out) {
  if (config.epsilons.size() != 1) {
    throw ConfigError("epsilon", "simulate takes a single value; use sweep for a list");
  }
  const OrbitContext ctx = make_context(config);
  const CaseResult r = run_case(config, ctx, config.epsilons.front());
  write_case(config, ctx, r, out);
  std::cout << "simulate: " << status_name(r.trajectory.status) << ", " << r.trajectory.size()
            << " points, energy drift " << r.energy_drift << ", momentum drift " << r.momentum_drift
            << '\n';
  if (!r.trajectory.complete()) {
    std::cerr << "integration stopped: " << r.trajectory.error << '\n';
    return kNumericalFailure;
  }
  return kSuccess;
}

int cmd_sweep(const ExperimentConfig& config, const fs::path& out) {
  const OrbitContext ctx = make_context(config);
  for (double eps : config.epsilons) make_problem(config, ctx, eps);  // fail fast before any work

  std::vector<std::future<CaseResult>> jobs;
  for (double eps : config.epsilons) {
    jobs.push_back(std::async(std::launch::async, [&config, ctx, eps] { return run_case(config, ctx, eps); }));
  }
  std::vector<CaseResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  fs::create_directories(out);
  std::ofstream csv(out / "sweep_summary.csv");
  csv << "epsilon,energy_drift,momentum_drift,curvature_proxy,delta\n";
  ordered_json cases = ordered_json::array();
  bool all_complete = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CaseResult& r = results[i];
    const std::string dir = "eps_" + std::to_string(i);
    write_case(config, ctx, r, out / dir);
    csv << g17(r.epsilon) << ',' << g17(r.energy_drift) << ',' << g17(r.momentum_drift) << ','
        << g17(r.curvature_proxy) << ',' << (r.delta ? std::to_string(*r.delta) : "") << '\n';
    cases.push_back({{"epsilon", r.epsilon},
                     {"directory", dir},
                     {"status", status_name(r.trajectory.status)},
                     {"energy_drift", num(r.energy_drift)},
                     {"momentum_drift", num(r.momentum_drift)},
                     {"curvature_proxy", num(r.curvature_proxy)},
                     {"delta", r.delta ? ordered_json(*r.delta) : ordered_json(nullptr)}});
    all_complete = all_complete && r.trajectory.complete();
  }
  write_json(out / "sweep_summary.json",
             {{"complete", all_complete}, {"config", config_echo(config)}, {"cases", std::move(cases)}});
  std::cout << "sweep: " << results.size() << " cases" << (all_complete ? "" : " (some incomplete)") << '\n';
  return all_complete ? kSuccess : kNumericalFailure;
}

int cmd_delta_report(const ExperimentConfig& config, const fs::path& out) {
  const OrbitContext ctx = make_context(config);
  const PhasePoint pt = make_initial_point(config, ctx);
  std::vector<ConservedQuantity> family;
  for (const auto& si : shift_family(ctx.algebra(), default_lambda_grid())) family.push_back(shift_quantity(si));
  const int count = independence_count(ctx, family, pt);

  ordered_json cases = ordered_json::array();
  std::optional<int> first;
  bool constant = true;
  for (double eps : config.epsilons) {
    ordered_json c{{"epsilon", eps}};
    try {
      const int d = delta(ctx, pt, eps);
      c["delta"] = d;
      c["momentum_orbit_dim"] = orbit_dimension(ctx.algebra(), momentum_map(pt, eps));
      if (!first) first = d;
      constant = constant && *first == d;
    } catch (const std::exception& e) {
      c["delta"] = nullptr;
      c["error"] = e.what();
      constant = false;
    }
    cases.push_back(std::move(c));
  }
  fs::create_directories(out);
  write_json(out / "delta_report.json", {{"algebra", ctx.algebra().name()},
                                         {"orbit_dim", ctx.orbit_dim()},
                                         {"annihilator_dim", ctx.ann_dim()},
                                         {"shift_family_independent", count},
                                         {"delta_constant_in_epsilon", constant},
                                         {"cases", std::move(cases)}});
  std::cout << "delta-report: orbit dim " << ctx.orbit_dim() << ", independent shift invariants " << count;
  if (first) std::cout << ", delta " << *first << (constant ? " for every epsilon" : " (varies)");
  std::cout << '\n';
  return kSuccess;
}

// ---- verify ----

namespace {

struct CheckContext {
  const ExperimentConfig& config;
  const OrbitContext& ctx;
  int samples;
};

struct Check {
  std::string name;
  std::function<double(const CheckContext&)> tolerance;
  std::function<double(const CheckContext&)> measure;
};

std::uint64_t sample_seed(const CheckContext& c, int s) { return c.config.rng_seed * 1000003ULL + static_cast<std::uint64_t>(s); }

PhasePoint sample_point(const CheckContext& c, int s) { return random_phase_point(c.ctx, sample_seed(c, s)); }

Element sample_tangent(const CheckContext& c, const Element& x, std::uint64_t seed) {
  return project_ann_perp(c.ctx, x, random_element(c.ctx.algebra(), seed));
}

// Test metric for checks that need a b: the configured one, else b = a.
MetricSpec check_sectional(const CheckContext& c) {
  if (is_sectional(c.config)) return c.config.metric;
  const Eigen::VectorXd& l = c.ctx.seed_eigenvalues();
  return MetricSpec::sectional(std::vector<double>(l.data(), l.data() + l.size()));
}

const std::vector<double> kCheckLambdas = {0.0, 0.5, 1.0};

double flow_tolerance(const CheckContext& c) { return is_sectional(c.config) ? 1e-7 : 1e-8; }

double conservation_worst(const CheckContext& c, bool momentum_and_energy) {
  double worst = 0.0;
  for (double eps : c.config.epsilons) {
    const FlowProblem problem = make_problem(c.config, c.ctx, eps);
    const Trajectory t = integrate(problem);
    if (!t.complete()) return std::numeric_limits<double>::infinity();
    const QuantityRegistry reg = standard_quantities(c.ctx, c.config.metric, eps);
    const ConservationReport r = conservation_report(t, reg.quantities());
    if (momentum_and_energy) {
      worst = std::max({worst, r.worst(QuantityKind::MomentumComponent, reg.quantities()),
                        r.worst(QuantityKind::Hamiltonian, reg.quantities())});
    } else {
      worst = std::max(worst, r.worst(QuantityKind::ShiftInvariant, reg.quantities()));
    }
  }
  return worst;
}

const std::vector<Check>& checks() {
  auto fixed = [](double v) { return [v](const CheckContext&) { return v; }; };
  static const std::vector<Check> all = {
      {"ann_splitting", fixed(1e-12),
       [](const CheckContext& c) {
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const Element x = sample_point(c, s).x;
           const Element v = random_element(c.ctx.algebra(), sample_seed(c, s) + 7);
           const Element a = project_ann(c.ctx, x, v), b = project_ann_perp(c.ctx, x, v);
           worst = std::max({worst, (a + b - v).norm(), std::abs(inner(a, b))});
         }
         return worst;
       }},
      {"kirillov_invariance", fixed(1e-11),
       [](const CheckContext& c) {
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const Element x = sample_point(c, s).x;
           const Element e1 = sample_tangent(c, x, sample_seed(c, s) + 11);
           const Element e2 = sample_tangent(c, x, sample_seed(c, s) + 13);
           const GroupElement g = random_group_element(c.ctx.algebra(), sample_seed(c, s) + 17);
           const double moved = kirillov_form(c.ctx, adjoint_action(g, x), adjoint_action(g, e1), adjoint_action(g, e2));
           worst = std::max(worst, std::abs(moved - kirillov_form(c.ctx, x, e1, e2)));
         }
         return worst;
       }},
      {"normal_cometric", fixed(1e-11),
       [](const CheckContext& c) {
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const PhasePoint pt = sample_point(c, s);
           const Element mu = commutator(pt.x, pt.p);
           const double lhs = inner(cometric_apply(c.ctx, MetricSpec::normal(), pt.x, pt.p), pt.p);
           worst = std::max(worst, std::abs(lhs - inner(mu, mu)));
         }
         return worst;
       }},
      {"spectral_equivariance", fixed(1e-10),
       [](const CheckContext& c) {
         const MetricSpec m = check_sectional(c);
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const Element x = sample_point(c, s).x;
           const GroupElement g = random_group_element(c.ctx.algebra(), sample_seed(c, s) + 19);
           worst = std::max(worst, (sectional_b_at(c.ctx, adjoint_action(g, x), m) -
                                    adjoint_action(g, sectional_b_at(c.ctx, x, m))).norm());
         }
         return worst;
       }},
      {"field_tangency", fixed(1e-11),
       [](const CheckContext& c) {
         const MetricSpec m = check_sectional(c);
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const PhasePoint pt = sample_point(c, s);
           for (double eps : c.config.epsilons) {
             for (const Element& xd : {normal_field(pt, eps).x_dot,
                                       general_field(c.ctx, c.config.metric, pt, eps).x_dot,
                                       sectional_field(c.ctx, m, pt, eps).x_dot}) {
               worst = std::max(worst, project_ann(c.ctx, pt.x, xd).norm());
             }
           }
         }
         return worst;
       }},
      {"general_equals_normal", fixed(1e-11),
       [](const CheckContext& c) {
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const PhasePoint pt = sample_point(c, s);
           for (double eps : c.config.epsilons) {
             const VectorField g = general_field(c.ctx, MetricSpec::normal(), pt, eps);
             const VectorField n = normal_field(pt, eps);
             worst = std::max({worst, (g.x_dot - n.x_dot).norm(), (g.p_dot - n.p_dot).norm()});
           }
         }
         return worst;
       }},
      {"hamiltonian_shift", fixed(1e-11),
       [](const CheckContext& c) {
         const double aa = inner(c.ctx.seed(), c.ctx.seed());
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const PhasePoint pt = sample_point(c, s);
           for (double eps : c.config.epsilons) {
             const double gap = hamiltonian_eps(pt, eps) - hamiltonian_normal(pt);
             worst = std::max(worst, std::abs(gap - 0.5 * eps * eps * aa));
           }
         }
         return worst;
       }},
      {"magnetic_force", fixed(1e-10),
       [](const CheckContext& c) {
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const PhasePoint pt = sample_point(c, s);
           for (double eps : c.config.epsilons) {
             const VectorField f = general_field(c.ctx, c.config.metric, pt, eps);
             const Element part = project_ann_perp(
                 c.ctx, pt.x, f.p_dot - general_field(c.ctx, c.config.metric, pt, 0.0).p_dot);
             worst = std::max(worst, (part - magnetic_force(c.ctx, pt.x, f.x_dot, eps)).norm());
           }
         }
         return worst;
       }},
      {"momentum_conservation", flow_tolerance,
       [](const CheckContext& c) { return conservation_worst(c, true); }},
      {"shift_invariant_conservation", flow_tolerance,
       [](const CheckContext& c) { return conservation_worst(c, false); }},
      {"shift_invariant_g_invariance", fixed(1e-10),
       [](const CheckContext& c) {
         double worst = 0.0;
         const auto family = shift_family(c.ctx.algebra(), default_lambda_grid());
         for (int s = 0; s < std::min(c.samples, 20); ++s) {
           const PhasePoint pt = sample_point(c, s);
           const GroupElement g = random_group_element(c.ctx.algebra(), sample_seed(c, s) + 23);
           const PhasePoint moved{adjoint_action(g, pt.x), adjoint_action(g, pt.p)};
           for (const auto& si : family) {
             const double v = shift_invariant_eval(si, pt);
             worst = std::max(worst, std::abs(shift_invariant_eval(si, moved) - v) / std::max(1.0, std::abs(v)));
           }
         }
         return worst;
       }},
      {"gradient_finite_difference", fixed(1e-7),
       [](const CheckContext& c) {
         double worst = 0.0;
         const auto family = shift_family(c.ctx.algebra(), kCheckLambdas);
         for (int s = 0; s < c.samples; ++s) {
           const Element mu = sample_tangent(c, c.ctx.seed(), sample_seed(c, s) + 29);
           const Element zeta = sample_tangent(c, c.ctx.seed(), sample_seed(c, s) + 31);
           const double h = 1e-5 * std::max(1.0, mu.norm());
           for (const auto& si : family) {
             const InvariantFunctionOnV f = shift_function_on_v(c.ctx, si);
             const double fd = (f.value(mu + h * zeta) - f.value(mu - h * zeta)) / (2.0 * h);
             const double exact = inner(f.gradient(mu), zeta);
             worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
           }
         }
         return worst;
       }},
      {"bracket_commutativity", fixed(1e-10),
       [](const CheckContext& c) {
         std::vector<InvariantFunctionOnV> fs;
         for (const auto& si : shift_family(c.ctx.algebra(), kCheckLambdas)) {
           fs.push_back(shift_function_on_v(c.ctx, si));
         }
         if (is_sectional(c.config)) fs.push_back(sectional_hamiltonian_on_v(c.ctx, c.config.metric));
         double worst = 0.0;
         for (int s = 0; s < c.samples; ++s) {
           const Element mu = sample_tangent(c, c.ctx.seed(), sample_seed(c, s) + 37);
           for (double eps : c.config.epsilons) {
             for (std::size_t i = 0; i < fs.size(); ++i) {
               for (std::size_t j = i + 1; j < fs.size(); ++j) {
                 worst = std::max(worst, std::abs(v_bracket(c.ctx, fs[i], fs[j], mu, eps)));
               }
             }
           }
         }
         return worst;
       }},
      {"independence_equals_delta", fixed(0.0),
       [](const CheckContext& c) {
         std::vector<ConservedQuantity> family;
         for (const auto& si : shift_family(c.ctx.algebra(), default_lambda_grid())) family.push_back(shift_quantity(si));
         double worst = 0.0;
         for (int s = 0; s < std::min(c.samples, 5); ++s) {
           const PhasePoint pt = sample_point(c, s);
           const int count = independence_count(c.ctx, family, pt);
           for (double eps : c.config.epsilons) {
             worst = std::max(worst, std::abs(static_cast<double>(count - delta(c.ctx, pt, eps))));
           }
         }
         return worst;
       }},
  };
  return all;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& c : checks()) out.push_back(c.name);
  return out;
}

int cmd_verify(const ExperimentConfig& config, const fs::path& out) {
  const OrbitContext ctx = make_context(config);
  for (double eps : config.epsilons) make_problem(config, ctx, eps);

  std::vector<const Check*> selected;
  if (!config.verify.checks) {
    for (const auto& c : checks()) selected.push_back(&c);
  } else {
    for (std::size_t i = 0; i < config.verify.checks->size(); ++i) {
      const std::string& name = (*config.verify.checks)[i];
      const auto it = std::find_if(checks().begin(), checks().end(), [&](const Check& c) { return c.name == name; });
      if (it == checks().end()) {
        throw ConfigError("verify.checks[" + std::to_string(i) + "]", "unknown check '" + name + "'");
      }
      selected.push_back(&*it);
    }
  }

  const CheckContext cc{config, ctx, config.verify.samples};
  ordered_json results = ordered_json::array();
  bool all_pass = true;
  for (const Check* c : selected) {
    const double tol = c->tolerance(cc);
    double measured = std::numeric_limits<double>::infinity();
    std::string error;
    try {
      measured = c->measure(cc);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const bool pass = std::isfinite(measured) && measured <= tol;
    all_pass = all_pass && pass;
    ordered_json r{{"name", c->name}, {"tolerance", tol}, {"measured", num(measured)}, {"pass", pass}};
    if (!error.empty()) r["error"] = error;
    results.push_back(std::move(r));
    std::cout << (pass ? "PASS " : "FAIL ") << c->name << ": " << measured << " (tol " << tol << ")\n";
  }
  fs::create_directories(out);
  write_json(out / "verification.json",
             {{"all_pass", all_pass}, {"config", config_echo(config)}, {"checks", std::move(results)}});
  return all_pass ? kSuccess : kChecksFailed;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Magnetic geodesic flows on adjoint orbits"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = "magflow_out", fault;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Override rng_seed");
  app.add_option("--fault-inject", fault, "Test hook: none | flip-magnetic-sign");
  auto* simulate = app.add_subcommand("simulate", "Integrate one flow, write trajectory.csv + summary.json");
  auto* verify = app.add_subcommand("verify", "Run named property checks, write verification.json");
  auto* sweep = app.add_subcommand("sweep", "Integrate one flow per epsilon, write sweep_summary.csv/json");
  auto* report = app.add_subcommand("delta-report", "Completeness counts, write delta_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.rng_seed = *seed;
    config.fault = parse_fault(fault);
    const fs::path out(out_dir);
    if (simulate->parsed()) return cmd_simulate(config, out);
    if (verify->parsed()) return cmd_verify(config, out);
    if (sweep->parsed()) return cmd_sweep(config, out);
    if (report->parsed()) return cmd_delta_report(config, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DegenerateOrbitPoint& e) {
    std::cerr << "degenerate orbit point: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace magflow::app
