#include "magflow/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "magflow/errors.hpp"

namespace magflow {

namespace {

PhasePoint axpy(const PhasePoint& y, double h, const VectorField& f) {
  return {y.x + h * f.x_dot, y.p + h * f.p_dot};
}

PhasePoint rk4_step(const FlowProblem& problem, const PhasePoint& y, double h) {
  const VectorField k1 = flow_field(problem, y);
  const VectorField k2 = flow_field(problem, axpy(y, 0.5 * h, k1));
  const VectorField k3 = flow_field(problem, axpy(y, 0.5 * h, k2));
  const VectorField k4 = flow_field(problem, axpy(y, h, k3));
  const double w = h / 6.0;
  return {y.x + w * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot),
          y.p + w * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot)};
}

// x and p are conjugated by exp(h mu), mu = [x, p], which moves x along the
// orbit exactly; the magnetic impulse eps * mu is then added to p.
PhasePoint splitting_step(const FlowProblem& problem, const PhasePoint& y, double h) {
  const double eps =
      problem.fault == FaultInjection::FlipMagneticSign ? -problem.epsilon : problem.epsilon;
  const Element mu = commutator(y.x, y.p);
  const GroupElement g = exp_map(h * mu);
  return {adjoint_action(g, y.x), adjoint_action(g, y.p) + (h * eps) * mu};
}

StepDiagnostics diagnose(const FlowProblem& problem, const PhasePoint& y,
                         std::span<const Monitor> monitors) {
  StepDiagnostics d;
  d.spectrum_drift = spectrum_drift(problem.ctx, y.x);
  d.ann_residual = ann_residual(problem.ctx, y);
  d.monitors.reserve(monitors.size());
  for (const auto& m : monitors) d.monitors.push_back(m(y));
  return d;
}

}  // namespace

VectorField normal_field(const PhasePoint& point, double eps) {
  const Element mu = commutator(point.x, point.p);
  return {commutator(mu, point.x), commutator(mu, point.p) + eps * mu};
}

VectorField general_field(const OrbitContext& ctx, const MetricSpec& metric,
                          const PhasePoint& point, double eps) {
  const Algebra& alg = ctx.algebra();
  const TangentFrame frame(ctx, point.x);
  const Element x_dot = cometric_apply(ctx, metric, point.x, point.p);
  const Element u = alg.from_coords(frame.ad_inverse(alg.coords(x_dot)));
  const Coords along =
      frame.ad_inverse(alg.coords(commutator(point.p, x_dot)));
  const Coords vertical = frame.project_ann(alg.coords(commutator(u, point.p)));
  return {x_dot, alg.from_coords(along - vertical) - eps * u};
}

VectorField sectional_field(const OrbitContext& ctx, const MetricSpec& metric,
                            const PhasePoint& point, double eps) {
  const Algebra& alg = ctx.algebra();
  const TangentFrame frame(ctx, point.x);
  const Element& x = point.x;
  const Element& p = point.p;
  const Element b_x = sectional_b_at(ctx, x, metric);
  const Element bp = commutator(b_x, p);
  const Coords along = frame.ad_inverse(alg.coords(commutator(p, commutator(x, bp))));
  const Coords vertical = frame.project_ann(alg.coords(commutator(bp, p)));
  return {commutator(bp, x), alg.from_coords(vertical - along) + eps * bp};
}

Element magnetic_force(const OrbitContext& ctx, const Element& x, const Element& x_dot,
                       double eps) {
  const TangentFrame frame(ctx, x);
  const Algebra& alg = ctx.algebra();
  return -eps * alg.from_coords(frame.ad_inverse(alg.coords(x_dot)));
}

void validate(const FlowProblem& problem) {
  const IntegratorSettings& s = problem.integrator;
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    throw std::invalid_argument("integrator: dt must be positive and finite");
  }
  if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) {
    throw std::invalid_argument("integrator: t_end must be non-negative and finite");
  }
  if (s.project_every < 0) throw std::invalid_argument("integrator: project_every must be >= 0");
  if (s.t_end > 0.0 && s.dt < 1e-12 * std::max(1.0, s.t_end)) {
    throw StepSizeUnderflow("integrator: dt " + std::to_string(s.dt) + " underflows t_end " +
                            std::to_string(s.t_end));
  }
  if (s.method == IntegratorMethod::ConjugationSplitting &&
      problem.metric.kind != MetricKind::Normal) {
    throw std::invalid_argument("integrator: conjugation splitting requires the normal metric");
  }
  if (!std::isfinite(problem.epsilon)) throw std::invalid_argument("epsilon must be finite");
  validate_metric(problem.ctx, problem.metric);
  const Algebra& alg = problem.ctx.algebra();
  if (!alg.contains(problem.initial.x.matrix(), 1e-10) ||
      !alg.contains(problem.initial.p.matrix(), 1e-10)) {
    throw std::invalid_argument("initial point is not in " + alg.name());
  }
  const double drift = spectrum_drift(problem.ctx, problem.initial.x);
  if (drift > 1e-9 * std::max(1.0, problem.ctx.seed().norm())) {
    throw std::invalid_argument("initial x is not on the orbit (spectrum drift " +
                                std::to_string(drift) + ")");
  }
  if (ann_residual(problem.ctx, problem.initial) > 1e-9) {
    throw std::invalid_argument("initial p has a component along ann(x)");
  }
}

VectorField flow_field(const FlowProblem& problem, const PhasePoint& point) {
  const double eps =
      problem.fault == FaultInjection::FlipMagneticSign ? -problem.epsilon : problem.epsilon;
  if (problem.metric.kind == MetricKind::Normal) return normal_field(point, eps);
  return sectional_field(problem.ctx, problem.metric, point, eps);
}

PhasePoint advance(const FlowProblem& problem, const PhasePoint& point, double h) {
  if (problem.integrator.method == IntegratorMethod::ConjugationSplitting) {
    return splitting_step(problem, point, h);
  }
  return rk4_step(problem, point, h);
}

PhasePoint projection_step(const OrbitContext& ctx, const PhasePoint& point, double max_drift) {
  const SkewEigen eig = skew_eigen(point.x);
  const double drift = (eig.lambda - ctx.seed_eigenvalues()).cwiseAbs().maxCoeff();
  if (drift > max_drift) {
    throw ProjectionFailure("spectrum drift " + std::to_string(drift) + " exceeds " +
                            std::to_string(max_drift));
  }
  PhasePoint out;
  out.x = from_skew_eigen(eig.vectors, ctx.seed_eigenvalues(), ctx.real_family());
  const TangentFrame frame(ctx, out.x);
  const Algebra& alg = ctx.algebra();
  out.p = alg.from_coords(frame.project_ann_perp(alg.coords(point.p)));
  return out;
}

Trajectory integrate(const FlowProblem& problem, std::span<const Monitor> monitors) {
  validate(problem);
  const IntegratorSettings& s = problem.integrator;
  const bool splitting = s.method == IntegratorMethod::ConjugationSplitting;
  const long n_steps =
      s.t_end == 0.0 ? 0 : static_cast<long>(std::ceil(s.t_end / s.dt - 1e-9));

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.points.reserve(n_steps + 1);
  traj.diagnostics.reserve(n_steps + 1);

  PhasePoint y = problem.initial;
  traj.times.push_back(0.0);
  traj.points.push_back(y);
  traj.diagnostics.push_back(diagnose(problem, y, monitors));

  for (long k = 1; k <= n_steps; ++k) {
    const double t_prev = traj.times.back();
    const double t_next = k == n_steps ? s.t_end : static_cast<double>(k) * s.dt;
    try {
      y = advance(problem, y, t_next - t_prev);
      traj.stats.field_evaluations += splitting ? 1 : 4;
      ++traj.stats.steps;
      if (s.project_every > 0 && k % s.project_every == 0) {
        traj.stats.max_corrected_drift =
            std::max(traj.stats.max_corrected_drift, spectrum_drift(problem.ctx, y.x));
        y = projection_step(problem.ctx, y, s.projection_tolerance);
        ++traj.stats.projections;
      }
      StepDiagnostics d = diagnose(problem, y, monitors);
      traj.times.push_back(t_next);
      traj.points.push_back(y);
      traj.diagnostics.push_back(std::move(d));
    } catch (const DegenerateOrbitPoint& e) {
      traj.status = TrajectoryStatus::DegenerateOrbitPoint;
      traj.error = e.what();
      break;
    } catch (const ProjectionFailure& e) {
      traj.status = TrajectoryStatus::ProjectionFailure;
      traj.error = e.what();
      break;
    }
  }
  return traj;
}

}  // namespace magflow
