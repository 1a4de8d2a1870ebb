#include "magflow/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace magflow {

namespace {

Complex i_pow(int k) {
  static const Complex table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((k % 4) + 4) % 4];
}

Matrix matrix_power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int j = 0; j < k; ++j) out = out * m;
  return out;
}

int numerical_rank(const Eigen::MatrixXd& m, double relative_tolerance) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > relative_tolerance * s[0]) ++rank;
  }
  return rank;
}

double drift(double value, double initial) {
  const double d = std::abs(value - initial);
  return std::abs(initial) < 1e-12 ? d : d / std::abs(initial);
}

}  // namespace

Element momentum_map(const PhasePoint& point, double eps) {
  return commutator(point.x, point.p) + eps * point.x;
}

double hamiltonian_normal(const PhasePoint& point) {
  const Element mu = commutator(point.x, point.p);
  return 0.5 * inner(mu, mu);
}

double hamiltonian_eps(const PhasePoint& point, double eps) {
  const Element phi = momentum_map(point, eps);
  return 0.5 * inner(phi, phi);
}

double hamiltonian_sectional(const OrbitContext& ctx, const MetricSpec& metric,
                             const PhasePoint& point) {
  const Element b_x = sectional_b_at(ctx, point.x, metric);
  return 0.5 * inner(sectional_operator_apply(point.x, b_x, point.p), point.p);
}

double hamiltonian(const OrbitContext& ctx, const MetricSpec& metric, const PhasePoint& point) {
  return metric.kind == MetricKind::Normal ? hamiltonian_normal(point)
                                           : hamiltonian_sectional(ctx, metric, point);
}

double invariant_polynomial(const Element& x, int k) {
  if (k < 1) throw std::invalid_argument("invariant_polynomial: degree must be >= 1");
  return (i_pow(k) * matrix_power(x.matrix(), k).trace()).real();
}

Coords invariant_polynomial_gradient(const Algebra& algebra, const Element& x, int k) {
  if (k < 1) throw std::invalid_argument("invariant_polynomial_gradient: degree must be >= 1");
  // d/ds P_k(X + sY) = k Re tr(i^k X^{k-1} Y); the basis is orthonormal so the
  // directional derivatives along B_j are the gradient coordinates.
  const Matrix w = static_cast<double>(k) * i_pow(k) * matrix_power(x.matrix(), k - 1);
  Coords g(algebra.dim());
  for (int j = 0; j < algebra.dim(); ++j) {
    g[j] = (w.array() * algebra.basis()[j].matrix().transpose().array()).sum().real();
  }
  return g;
}

std::string ShiftInvariant::name() const {
  std::ostringstream os;
  os << "F_" << k << "_" << lambda;
  return os.str();
}

double shift_invariant_eval(const ShiftInvariant& si, const PhasePoint& point) {
  return invariant_polynomial(commutator(point.x, point.p) + si.lambda * point.x, si.k);
}

std::vector<double> default_lambda_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

std::vector<ShiftInvariant> shift_family(const Algebra& algebra,
                                         std::span<const double> lambdas) {
  std::vector<ShiftInvariant> out;
  for (int k : algebra.invariant_degrees()) {
    for (double l : lambdas) out.push_back({k, l});
  }
  return out;
}

Element gradient_on_v(const OrbitContext& ctx, const ShiftInvariant& si, const Element& mu) {
  const Algebra& alg = ctx.algebra();
  const TangentFrame frame(ctx, ctx.seed());
  const Coords g = invariant_polynomial_gradient(alg, mu + si.lambda * ctx.seed(), si.k);
  return alg.from_coords(frame.project_ann_perp(g));
}

InvariantFunctionOnV shift_function_on_v(const OrbitContext& ctx, const ShiftInvariant& si) {
  auto c = std::make_shared<const OrbitContext>(ctx);
  InvariantFunctionOnV f;
  f.name = si.name();
  f.value = [c, si](const Element& mu) {
    return invariant_polynomial(mu + si.lambda * c->seed(), si.k);
  };
  f.gradient = [c, si](const Element& mu) { return gradient_on_v(*c, si, mu); };
  return f;
}

InvariantFunctionOnV sectional_hamiltonian_on_v(const OrbitContext& ctx,
                                                const MetricSpec& metric) {
  auto c = std::make_shared<const OrbitContext>(ctx);
  const Element b = sectional_b_at(ctx, ctx.seed(), metric);
  auto apply = [c, b](const Element& mu) {
    const TangentFrame frame(*c, c->seed());
    const Algebra& alg = c->algebra();
    return alg.from_coords(frame.ad_inverse(alg.coords(commutator(b, mu))));
  };
  InvariantFunctionOnV f;
  f.name = "H_ab";
  f.value = [apply](const Element& mu) { return 0.5 * inner(apply(mu), mu); };
  f.gradient = apply;
  return f;
}

double v_bracket(const OrbitContext& ctx, const InvariantFunctionOnV& f,
                 const InvariantFunctionOnV& g, const Element& mu, double eps) {
  const TangentFrame frame(ctx, ctx.seed());
  const Coords c = ctx.algebra().coords(mu);
  if (frame.project_ann(c).norm() > 1e-9 * std::max(1.0, c.norm())) {
    throw std::invalid_argument("v_bracket: mu is not in ann(a)^perp");
  }
  return -inner(mu + eps * ctx.seed(), commutator(f.gradient(mu), g.gradient(mu)));
}

std::vector<ConservedQuantity> momentum_components(const Algebra& algebra, double eps) {
  std::vector<ConservedQuantity> out;
  for (int i = 0; i < algebra.dim(); ++i) {
    const Element b = algebra.basis()[i];
    out.push_back({"Phi_" + std::to_string(i), QuantityKind::MomentumComponent,
                   [b, eps](const PhasePoint& pt) { return inner(momentum_map(pt, eps), b); }});
  }
  return out;
}

ConservedQuantity hamiltonian_quantity(const OrbitContext& ctx, const MetricSpec& metric) {
  if (metric.kind == MetricKind::Normal) {
    return {"H", QuantityKind::Hamiltonian, [](const PhasePoint& pt) { return hamiltonian_normal(pt); }};
  }
  auto c = std::make_shared<const OrbitContext>(ctx);
  return {"H_ab", QuantityKind::Hamiltonian,
          [c, metric](const PhasePoint& pt) { return hamiltonian_sectional(*c, metric, pt); }};
}

ConservedQuantity shift_quantity(const ShiftInvariant& si) {
  return {si.name(), QuantityKind::ShiftInvariant,
          [si](const PhasePoint& pt) { return shift_invariant_eval(si, pt); }};
}

QuantityRegistry::QuantityRegistry(const OrbitContext& ctx, std::uint64_t probe_seed)
    : ctx_(std::make_shared<const OrbitContext>(ctx)), probe_seed_(probe_seed) {}

double QuantityRegistry::invariance_defect(const ConservedQuantity& q) const {
  const PhasePoint pt = random_phase_point(*ctx_, probe_seed_);
  const double ref = q.evaluate(pt);
  double worst = 0.0;
  for (int j = 0; j < 20; ++j) {
    const GroupElement g = random_group_element(ctx_->algebra(), probe_seed_ + 1000 + j);
    const double v = q.evaluate({adjoint_action(g, pt.x), adjoint_action(g, pt.p)});
    worst = std::max(worst, std::abs(v - ref) / std::max(1.0, std::abs(ref)));
  }
  return worst;
}

void QuantityRegistry::add(ConservedQuantity q) {
  if (q.kind != QuantityKind::MomentumComponent) {
    const double defect = invariance_defect(q);
    if (defect > 1e-10) {
      throw std::invalid_argument("quantity " + q.name + " is not G-invariant (defect " +
                                  std::to_string(defect) + ")");
    }
  }
  quantities_.push_back(std::move(q));
}

void QuantityRegistry::add(std::vector<ConservedQuantity> qs) {
  for (auto& q : qs) add(std::move(q));
}

std::vector<Monitor> QuantityRegistry::monitors() const {
  std::vector<Monitor> out;
  for (const auto& q : quantities_) out.push_back(q.evaluate);
  return out;
}

QuantityRegistry standard_quantities(const OrbitContext& ctx, const MetricSpec& metric,
                                     double eps) {
  QuantityRegistry reg(ctx);
  reg.add(momentum_components(ctx.algebra(), eps));
  reg.add(hamiltonian_quantity(ctx, metric));
  const auto grid = default_lambda_grid();
  for (const auto& si : shift_family(ctx.algebra(), grid)) reg.add(shift_quantity(si));
  return reg;
}

double ConservationReport::worst() const {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.max_drift);
  return w;
}

double ConservationReport::worst(QuantityKind kind,
                                 std::span<const ConservedQuantity> quantities) const {
  double w = 0.0;
  for (std::size_t i = 0; i < entries.size() && i < quantities.size(); ++i) {
    if (quantities[i].kind == kind) w = std::max(w, entries[i].max_drift);
  }
  return w;
}

const DriftSummary* ConservationReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ConservationReport conservation_report(const Trajectory& traj,
                                       std::span<const ConservedQuantity> quantities) {
  if (traj.points.empty()) throw std::invalid_argument("conservation_report: empty trajectory");
  ConservationReport report;
  for (const auto& q : quantities) {
    DriftSummary s;
    s.name = q.name;
    s.initial = q.evaluate(traj.points.front());
    s.relative = std::abs(s.initial) >= 1e-12;
    double sum = 0.0;
    for (std::size_t k = 1; k < traj.points.size(); ++k) {
      const double d = drift(q.evaluate(traj.points[k]), s.initial);
      s.max_drift = std::max(s.max_drift, d);
      sum += d;
    }
    if (traj.points.size() > 1) s.mean_drift = sum / static_cast<double>(traj.points.size() - 1);
    report.entries.push_back(std::move(s));
  }
  return report;
}

int independence_count(const OrbitContext& ctx, std::span<const ConservedQuantity> quantities,
                       const PhasePoint& point, double rank_tolerance, double relative_step) {
  const Algebra& alg = ctx.algebra();
  const TangentFrame frame(ctx, point.x);
  const Eigen::MatrixXd& dirs = frame.range_basis();
  const int r = static_cast<int>(dirs.cols());
  const double scale = std::sqrt(inner(point.x, point.x) + inner(point.p, point.p));
  const double h = relative_step * std::max(1.0, scale);

  auto group_move = [&](const Element& xi, double s) {
    const GroupElement g = exp_map(s * xi);
    return PhasePoint{adjoint_action(g, point.x), adjoint_action(g, point.p)};
  };
  auto fibre_move = [&](const Element& zeta, double s) {
    return PhasePoint{point.x, point.p + s * zeta};
  };

  Eigen::MatrixXd jac(static_cast<Eigen::Index>(quantities.size()), 2 * r);
  for (int j = 0; j < r; ++j) {
    const Element dir = alg.from_coords(dirs.col(j));
    const PhasePoint gp = group_move(dir, h), gm = group_move(dir, -h);
    const PhasePoint fp = fibre_move(dir, h), fm = fibre_move(dir, -h);
    for (std::size_t q = 0; q < quantities.size(); ++q) {
      const auto& f = quantities[q].evaluate;
      jac(q, j) = (f(gp) - f(gm)) / (2.0 * h);
      jac(q, r + j) = (f(fp) - f(fm)) / (2.0 * h);
    }
  }
  return numerical_rank(jac, rank_tolerance);
}

int orbit_dimension(const Algebra& algebra, const Element& y) {
  return numerical_rank(algebra.ad_operator(y), 1e-8);
}

int delta(const OrbitContext& ctx, const PhasePoint& point, double eps) {
  const Element phi = momentum_map(point, eps);
  if (phi.norm() == 0.0) throw std::invalid_argument("delta: Phi_eps vanishes at this point");
  const int dim_phi = orbit_dimension(ctx.algebra(), phi);
  if (dim_phi % 2 != 0) {
    throw std::domain_error("delta: odd orbit dimension " + std::to_string(dim_phi) +
                            " at Phi_eps (non-generic point)");
  }
  return ctx.orbit_dim() - dim_phi / 2;
}

}  // namespace magflow
