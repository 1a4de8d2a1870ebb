#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "magflow/orbit.hpp"

namespace magflow {

/// Time derivative of a phase point.
struct VectorField {
  Element x_dot;
  Element p_dot;
};

/// Normal metric: xdot = [[x,p],x], pdot = [[x,p],p] + eps [x,p].
VectorField normal_field(const PhasePoint& point, double eps);

/// Arbitrary G-invariant metric through its co-metric phi_x^{-1}:
///   xdot = phi_x^{-1} p
///   pdot = ad_x^{-1}[p, xdot] - pr_ann(x)[ad_x^{-1} xdot, p] - eps ad_x^{-1} xdot
VectorField general_field(const OrbitContext& ctx, const MetricSpec& metric,
                          const PhasePoint& point, double eps);

/// Sectional metric K_{a,b}:
///   xdot = [[b_x,p],x]
///   pdot = -ad_x^{-1}[p,[x,[b_x,p]]] + pr_ann(x)[[b_x,p],p] + eps [b_x,p]
VectorField sectional_field(const OrbitContext& ctx, const MetricSpec& metric,
                            const PhasePoint& point, double eps);

/// Lorentz-type force -eps ad_x^{-1} xdot acting on p.
Element magnetic_force(const OrbitContext& ctx, const Element& x, const Element& x_dot, double eps);

enum class IntegratorMethod { RungeKutta4Projected, ConjugationSplitting };

/// Test hook: FlipMagneticSign integrates the eps term of pdot with the wrong
/// sign while every diagnostic still uses +eps.
enum class FaultInjection { None, FlipMagneticSign };

struct IntegratorSettings {
  IntegratorMethod method = IntegratorMethod::RungeKutta4Projected;
  double dt = 1e-3;
  double t_end = 10.0;
  /// Project onto the constraint manifold every this many steps; 0 disables.
  int project_every = 1;
  /// Largest spectrum drift projection_step accepts.
  double projection_tolerance = 1e-4;
};

struct FlowProblem {
  OrbitContext ctx;
  MetricSpec metric;
  double epsilon = 0.0;
  PhasePoint initial;
  IntegratorSettings integrator;
  FaultInjection fault = FaultInjection::None;
};

/// Throws std::invalid_argument for an inconsistent problem and
/// StepSizeUnderflow when dt is too small to make progress toward t_end.
void validate(const FlowProblem& problem);

using Monitor = std::function<double(const PhasePoint&)>;

struct StepDiagnostics {
  double spectrum_drift = 0.0;
  double ann_residual = 0.0;
  std::vector<double> monitors;
};

enum class TrajectoryStatus { Complete, DegenerateOrbitPoint, ProjectionFailure };

struct IntegratorStats {
  long steps = 0;
  long field_evaluations = 0;
  long projections = 0;
  /// Largest spectrum drift removed by a projection.
  double max_corrected_drift = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> points;
  std::vector<StepDiagnostics> diagnostics;
  TrajectoryStatus status = TrajectoryStatus::Complete;
  std::string error;
  IntegratorStats stats;

  bool complete() const { return status == TrajectoryStatus::Complete; }
  std::size_t size() const { return points.size(); }
};

/// The field the problem integrates (metric dispatch plus fault injection).
VectorField flow_field(const FlowProblem& problem, const PhasePoint& point);

/// One unprojected step of size h (h may be negative).
PhasePoint advance(const FlowProblem& problem, const PhasePoint& point, double h);

/// Restores x to the orbit by resetting its eigenvalues to those of a (same
/// eigenvectors) and moves p to ann(x)^perp. Throws ProjectionFailure when
/// the spectrum drift exceeds max_drift.
PhasePoint projection_step(const OrbitContext& ctx, const PhasePoint& point,
                           double max_drift = 1e-4);

/// Fixed-step integration on [0, t_end]. Diagnostics and monitors are
/// recorded at every step. Degenerate points or failed projections stop the
/// run and leave the partial trajectory with the matching status.
Trajectory integrate(const FlowProblem& problem, std::span<const Monitor> monitors = {});

}  // namespace magflow
