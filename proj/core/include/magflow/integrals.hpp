#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "magflow/dynamics.hpp"

namespace magflow {

/// Phi_eps(x, p) = [x, p] + eps x
Element momentum_map(const PhasePoint& point, double eps);

/// H_0 = 1/2 <[x,p], [x,p]>
double hamiltonian_normal(const PhasePoint& point);

/// H_eps = 1/2 <Phi_eps, Phi_eps>; equals H_0 + eps^2 <a,a> / 2 on T*O(a).
double hamiltonian_eps(const PhasePoint& point, double eps);

/// H_{a,b} = 1/2 <phi_{x,b_x} p, p>
double hamiltonian_sectional(const OrbitContext& ctx, const MetricSpec& metric,
                             const PhasePoint& point);

/// Kinetic energy of the metric: H_0 or H_{a,b}.
double hamiltonian(const OrbitContext& ctx, const MetricSpec& metric, const PhasePoint& point);

/// P_k(X) = Re tr((iX)^k). Real and Ad-invariant on both families; odd k
/// vanish identically on so(n).
double invariant_polynomial(const Element& x, int k);

/// Coordinates of the gradient of P_k at X with respect to <.,.>.
Coords invariant_polynomial_gradient(const Algebra& algebra, const Element& x, int k);

/// Member of the argument-shift family, pulled back to phase space:
/// F_{k,lambda}(x, p) = P_k([x, p] + lambda x).
struct ShiftInvariant {
  int k = 2;
  double lambda = 0.0;

  std::string name() const;
};

double shift_invariant_eval(const ShiftInvariant& si, const PhasePoint& point);

/// All (k, lambda) for the algebra's invariant degrees and the lambda grid.
std::vector<ShiftInvariant> shift_family(const Algebra& algebra,
                                         std::span<const double> lambdas);
std::vector<double> default_lambda_grid();

/// Gradient on v = ann(a)^perp of mu -> P_k(mu + lambda a).
Element gradient_on_v(const OrbitContext& ctx, const ShiftInvariant& si, const Element& mu);

/// Ad_{G_a}-invariant function on v together with its exact gradient.
struct InvariantFunctionOnV {
  std::string name;
  std::function<double(const Element&)> value;
  std::function<Element(const Element&)> gradient;
};

InvariantFunctionOnV shift_function_on_v(const OrbitContext& ctx, const ShiftInvariant& si);

/// 1/2 <ad_a^{-1} ad_b mu, mu>, the sectional Hamiltonian on v.
InvariantFunctionOnV sectional_hamiltonian_on_v(const OrbitContext& ctx,
                                                const MetricSpec& metric);

/// {f, g}^eps_v(mu) = -<mu + eps a, [grad f(mu), grad g(mu)]>.
/// Throws std::invalid_argument when mu has a component along ann(a).
double v_bracket(const OrbitContext& ctx, const InvariantFunctionOnV& f,
                 const InvariantFunctionOnV& g, const Element& mu, double eps);

enum class QuantityKind { MomentumComponent, Hamiltonian, ShiftInvariant };

struct ConservedQuantity {
  std::string name;
  QuantityKind kind;
  std::function<double(const PhasePoint&)> evaluate;
};

/// <Phi_eps, B_i> for every basis element B_i.
std::vector<ConservedQuantity> momentum_components(const Algebra& algebra, double eps);
ConservedQuantity hamiltonian_quantity(const OrbitContext& ctx, const MetricSpec& metric);
ConservedQuantity shift_quantity(const ShiftInvariant& si);

/// Collects quantities, checking G-invariance of Hamiltonian and
/// ShiftInvariant kinds at registration (20 random conjugations of a random
/// phase point, relative deviation <= 1e-10).
class QuantityRegistry {
 public:
  explicit QuantityRegistry(const OrbitContext& ctx, std::uint64_t probe_seed = 17);

  void add(ConservedQuantity q);
  void add(std::vector<ConservedQuantity> qs);

  const std::vector<ConservedQuantity>& quantities() const { return quantities_; }
  std::vector<Monitor> monitors() const;

  /// Largest relative change of q under conjugation of the probe point.
  double invariance_defect(const ConservedQuantity& q) const;

 private:
  std::shared_ptr<const OrbitContext> ctx_;
  std::uint64_t probe_seed_;
  std::vector<ConservedQuantity> quantities_;
};

/// Standard set: momentum components, the metric's Hamiltonian and the shift
/// family on the default lambda grid.
QuantityRegistry standard_quantities(const OrbitContext& ctx, const MetricSpec& metric, double eps);

struct DriftSummary {
  std::string name;
  double initial = 0.0;
  double max_drift = 0.0;
  double mean_drift = 0.0;
  /// False when |initial| < 1e-12 and the drift is absolute.
  bool relative = true;
};

struct ConservationReport {
  std::vector<DriftSummary> entries;

  double worst() const;
  double worst(QuantityKind kind, std::span<const ConservedQuantity> quantities) const;
  const DriftSummary* find(const std::string& name) const;
};

ConservationReport conservation_report(const Trajectory& traj,
                                       std::span<const ConservedQuantity> quantities);

/// Numerical rank of the phase-space differentials of the quantities at a
/// point, from central differences along 2 * orbit_dim curves tangent to
/// T*O(a) (group orbit through (x, p) and the fibre directions).
int independence_count(const OrbitContext& ctx, std::span<const ConservedQuantity> quantities,
                       const PhasePoint& point, double rank_tolerance = 1e-8,
                       double relative_step = 1e-5);

/// dim g - dim ann(y), with a 1e-8 relative rank threshold.
int orbit_dimension(const Algebra& algebra, const Element& y);

/// delta = dim O(a) - dim O(Phi_eps(x, p)) / 2. Throws std::invalid_argument
/// for Phi_eps = 0 and std::domain_error when dim O(Phi_eps) is odd.
int delta(const OrbitContext& ctx, const PhasePoint& point, double eps);

}  // namespace magflow
