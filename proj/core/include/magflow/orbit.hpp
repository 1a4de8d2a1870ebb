#pragma once

#include <span>
#include <vector>

#include "magflow/algebra.hpp"

namespace magflow {

/// Gap and clustering threshold for singular values and eigenvalues.
inline constexpr double kDegeneracyTolerance = 1e-8;
/// Largest admissible condition number of ad_x restricted to ann(x)^perp.
inline constexpr double kMaxConditionNumber = 1e10;

/// The adjoint orbit O(a) through a seed element a.
class OrbitContext {
 public:
  OrbitContext(Algebra algebra, Element seed);

  const Algebra& algebra() const { return algebra_; }
  const Element& seed() const { return seed_; }
  int dim() const { return algebra_.dim(); }
  int ann_dim() const { return ann_dim_; }
  int orbit_dim() const { return algebra_.dim() - ann_dim_; }
  /// Imaginary parts of spectrum(a), ascending.
  const Eigen::VectorXd& seed_eigenvalues() const { return seed_lambda_; }
  std::vector<Complex> seed_spectrum() const;
  bool real_family() const { return algebra_.family() == Family::SpecialOrthogonal; }

 private:
  Algebra algebra_;
  Element seed_;
  int ann_dim_ = 0;
  Eigen::VectorXd seed_lambda_;
};

/// Redundant-variable point of T*O(a): x on the orbit, p in ann(x)^perp.
struct PhasePoint {
  Element x;
  Element p;
};

/// SVD-based splitting of the algebra at x into ann(x) and ann(x)^perp. The
/// rank is fixed to ctx.orbit_dim(); construction throws DegenerateOrbitPoint
/// when the singular-value gap at that rank falls below kDegeneracyTolerance.
class TangentFrame {
 public:
  TangentFrame(const OrbitContext& ctx, const Element& x);

  /// Columns: orthonormal coordinates of ann(x) / ann(x)^perp.
  const Eigen::MatrixXd& ann_basis() const { return ann_; }
  const Eigen::MatrixXd& range_basis() const { return range_; }
  const Eigen::VectorXd& singular_values() const { return sigma_; }
  double gap() const { return gap_; }
  double condition_number() const;

  Coords project_ann(const Coords& v) const;
  Coords project_ann_perp(const Coords& v) const;
  /// Pseudo-inverse of xi -> [x, xi]; the result lies in ann(x)^perp.
  Coords ad_inverse(const Coords& eta) const;

 private:
  int rank_;
  Eigen::MatrixXd ann_;
  Eigen::MatrixXd range_;
  Eigen::MatrixXd left_;
  Eigen::VectorXd sigma_;
  double gap_;
};

std::vector<Element> annihilator_basis(const OrbitContext& ctx, const Element& x);
Element project_ann(const OrbitContext& ctx, const Element& x, const Element& v);
Element project_ann_perp(const OrbitContext& ctx, const Element& x, const Element& v);

/// Unique xi in ann(x)^perp with [x, xi] = eta. Throws NotInImage when
/// ||pr_ann(x) eta|| > 1e-9 ||eta||, DegenerateOrbitPoint when the restricted
/// operator is too badly conditioned.
Element ad_inverse(const OrbitContext& ctx, const Element& x, const Element& eta);

/// Kirillov-Kostant form -<x, [xi1, xi2]> with eta_i = [xi_i, x].
double kirillov_form(const OrbitContext& ctx, const Element& x, const Element& eta1,
                     const Element& eta2);

/// <xi1, xi2> with eta_i = [xi_i, x], xi_i in ann(x)^perp.
double normal_metric(const OrbitContext& ctx, const Element& x, const Element& eta1,
                     const Element& eta2);

enum class MetricKind { Normal, Sectional };

/// A G-invariant metric on the orbit. For Sectional, b = f(a) is given by one
/// value per eigenvalue of a (ascending imaginary part), so b_x = f(x).
struct MetricSpec {
  MetricKind kind = MetricKind::Normal;
  std::vector<double> b_spectral;

  static MetricSpec normal() { return {}; }
  static MetricSpec sectional(std::vector<double> values) {
    return {MetricKind::Sectional, std::move(values)};
  }
};

/// Throws std::invalid_argument unless the sectional data yields b in the
/// algebra commuting with a and a positive definite -ad_a ad_b on ann(a)^perp.
void validate_metric(const OrbitContext& ctx, const MetricSpec& metric);

/// Smallest eigenvalue of -ad_a ad_b restricted to ann(a)^perp.
double sectional_min_eigenvalue(const OrbitContext& ctx, const MetricSpec& metric);

/// f(x) for per-eigenvalue values; throws DegenerateOrbitPoint when distinct
/// eigenvalues of a have merged closer than kDegeneracyTolerance at x.
Element spectral_function(const OrbitContext& ctx, const Element& x, std::span<const double> values);

Element sectional_b_at(const OrbitContext& ctx, const Element& x, const MetricSpec& metric);

/// -[x, [b_x, p]]
Element sectional_operator_apply(const Element& x, const Element& b_x, const Element& p);

/// The co-metric phi_x^{-1} p: [[x, p], x] for Normal, -[x, [b_x, p]] for
/// Sectional.
Element cometric_apply(const OrbitContext& ctx, const MetricSpec& metric, const Element& x,
                       const Element& p);

/// K_{a,b}(eta1, eta2) = <ad_{b_x}^{-1} eta1, ad_x^{-1} eta2>.
double metric_K_ab(const OrbitContext& ctx, const Element& x, const Element& eta1,
                   const Element& eta2, const MetricSpec& metric);

/// max_k |lambda_k(x) - lambda_k(a)|
double spectrum_drift(const OrbitContext& ctx, const Element& x);

/// ||pr_ann(x) p|| / ||p|| (0 for p = 0).
double ann_residual(const OrbitContext& ctx, const PhasePoint& point);

}  // namespace magflow

namespace magflow {

/// x = Ad_g(a) for a random g, p a random element of ann(x)^perp scaled to
/// norm p_norm. Deterministic for a fixed seed.
PhasePoint random_phase_point(const OrbitContext& ctx, std::uint64_t seed, double p_norm = 1.0);

}  // namespace magflow
