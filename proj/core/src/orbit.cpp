#include "magflow/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "magflow/errors.hpp"

namespace magflow {

namespace {

// Reference eigenvalues of a and x must have the same clustering structure.
void check_clustering(const Eigen::VectorXd& seed, const Eigen::VectorXd& at_x) {
  for (Eigen::Index k = 0; k + 1 < seed.size(); ++k) {
    const bool distinct_at_seed = seed[k + 1] - seed[k] > kDegeneracyTolerance;
    if (distinct_at_seed && at_x[k + 1] - at_x[k] < kDegeneracyTolerance) {
      throw DegenerateOrbitPoint("eigenvalues " + std::to_string(k) + " and " +
                                 std::to_string(k + 1) + " have merged (gap " +
                                 std::to_string(at_x[k + 1] - at_x[k]) + ")");
    }
  }
}

Eigen::MatrixXd restricted(const Eigen::MatrixXd& op, const Eigen::MatrixXd& basis) {
  return basis.transpose() * op * basis;
}

}  // namespace

OrbitContext::OrbitContext(Algebra algebra, Element seed)
    : algebra_(std::move(algebra)), seed_(std::move(seed)) {
  if (!algebra_.contains(seed_.matrix(), 1e-12)) {
    throw std::invalid_argument("OrbitContext: seed is not an element of " + algebra_.name());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(algebra_.ad_operator(seed_));
  const Eigen::VectorXd& s = svd.singularValues();
  const double threshold = kDegeneracyTolerance * std::max(1.0, s.size() ? s[0] : 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > threshold) ++rank;
  }
  ann_dim_ = algebra_.dim() - rank;
  if (rank % 2 != 0) {
    throw std::invalid_argument("OrbitContext: odd orbit dimension " + std::to_string(rank));
  }
  seed_lambda_ = skew_eigen(seed_).lambda;
}

std::vector<Complex> OrbitContext::seed_spectrum() const { return spectrum(seed_); }

TangentFrame::TangentFrame(const OrbitContext& ctx, const Element& x) : rank_(ctx.orbit_dim()) {
  const int dim = ctx.dim();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctx.algebra().ad_operator(x),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  sigma_ = svd.singularValues();
  gap_ = std::numeric_limits<double>::infinity();
  if (rank_ > 0 && rank_ < dim) {
    gap_ = sigma_[rank_ - 1] - sigma_[rank_];
  } else if (rank_ > 0) {
    gap_ = sigma_[rank_ - 1];
  }
  if (rank_ > 0 && gap_ < kDegeneracyTolerance) {
    throw DegenerateOrbitPoint("singular-value gap " + std::to_string(gap_) + " at rank " +
                               std::to_string(rank_));
  }
  range_ = svd.matrixV().leftCols(rank_);
  left_ = svd.matrixU().leftCols(rank_);
  ann_ = svd.matrixV().rightCols(dim - rank_);
}

double TangentFrame::condition_number() const {
  if (rank_ == 0) return 1.0;
  return sigma_[0] / sigma_[rank_ - 1];
}

Coords TangentFrame::project_ann(const Coords& v) const { return ann_ * (ann_.transpose() * v); }

Coords TangentFrame::project_ann_perp(const Coords& v) const { return v - project_ann(v); }

Coords TangentFrame::ad_inverse(const Coords& eta) const {
  Eigen::VectorXd w = left_.transpose() * eta;
  for (int k = 0; k < rank_; ++k) w[k] /= sigma_[k];
  return range_ * w;
}

std::vector<Element> annihilator_basis(const OrbitContext& ctx, const Element& x) {
  const TangentFrame frame(ctx, x);
  std::vector<Element> out;
  for (Eigen::Index k = 0; k < frame.ann_basis().cols(); ++k) {
    out.push_back(ctx.algebra().from_coords(frame.ann_basis().col(k)));
  }
  return out;
}

Element project_ann(const OrbitContext& ctx, const Element& x, const Element& v) {
  const TangentFrame frame(ctx, x);
  return ctx.algebra().from_coords(frame.project_ann(ctx.algebra().coords(v)));
}

Element project_ann_perp(const OrbitContext& ctx, const Element& x, const Element& v) {
  const TangentFrame frame(ctx, x);
  return ctx.algebra().from_coords(frame.project_ann_perp(ctx.algebra().coords(v)));
}

Element ad_inverse(const OrbitContext& ctx, const Element& x, const Element& eta) {
  const TangentFrame frame(ctx, x);
  if (frame.condition_number() > kMaxConditionNumber) {
    throw DegenerateOrbitPoint("ad_x condition number " + std::to_string(frame.condition_number()));
  }
  const Coords c = ctx.algebra().coords(eta);
  const double nrm = c.norm();
  if (nrm == 0.0) return ctx.algebra().zero();
  const double leak = frame.project_ann(c).norm();
  if (leak > 1e-9 * nrm) {
    throw NotInImage("ad_inverse: component along ann(x) of relative size " +
                     std::to_string(leak / nrm));
  }
  return ctx.algebra().from_coords(frame.ad_inverse(c));
}

double kirillov_form(const OrbitContext& ctx, const Element& x, const Element& eta1,
                     const Element& eta2) {
  // eta = [xi, x] = -ad_x(xi); the two sign flips cancel inside the bracket.
  const Element xi1 = ad_inverse(ctx, x, eta1);
  const Element xi2 = ad_inverse(ctx, x, eta2);
  return -inner(x, commutator(xi1, xi2));
}

double normal_metric(const OrbitContext& ctx, const Element& x, const Element& eta1,
                     const Element& eta2) {
  return inner(ad_inverse(ctx, x, eta1), ad_inverse(ctx, x, eta2));
}

Element spectral_function(const OrbitContext& ctx, const Element& x,
                          std::span<const double> values) {
  if (static_cast<int>(values.size()) != ctx.algebra().n()) {
    throw std::invalid_argument("spectral_function: expected " +
                                std::to_string(ctx.algebra().n()) + " values");
  }
  const SkewEigen eig = skew_eigen(x);
  check_clustering(ctx.seed_eigenvalues(), eig.lambda);
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  return from_skew_eigen(eig.vectors, f, ctx.real_family());
}

void validate_metric(const OrbitContext& ctx, const MetricSpec& metric) {
  if (metric.kind == MetricKind::Normal) return;
  const auto& f = metric.b_spectral;
  const int n = ctx.algebra().n();
  if (static_cast<int>(f.size()) != n) {
    throw std::invalid_argument("sectional metric: b_spectral needs " + std::to_string(n) +
                                " values, got " + std::to_string(f.size()));
  }
  if (ctx.real_family()) {
    for (int k = 0; k < n; ++k) {
      if (std::abs(f[k] + f[n - 1 - k]) > 1e-12) {
        throw std::invalid_argument(
            "sectional metric: so(n) spectral values must be odd-symmetric (f_k = -f_{n-1-k})");
      }
    }
  } else {
    double sum = 0.0;
    for (double v : f) sum += v;
    if (std::abs(sum) > 1e-12) {
      throw std::invalid_argument("sectional metric: su(n) spectral values must sum to zero");
    }
  }
  const Eigen::VectorXd& lambda = ctx.seed_eigenvalues();
  for (int k = 0; k + 1 < n; ++k) {
    if (lambda[k + 1] - lambda[k] <= kDegeneracyTolerance && f[k] != f[k + 1]) {
      throw std::invalid_argument(
          "sectional metric: repeated eigenvalues of a need equal spectral values");
    }
  }
  const Element b = spectral_function(ctx, ctx.seed(), f);
  const double scale = std::max(1.0, b.norm() * std::max(1.0, ctx.seed().norm()));
  if (!ctx.algebra().contains(b.matrix(), 1e-12) ||
      commutator(b, ctx.seed()).matrix().norm() > 1e-12 * scale) {
    throw std::invalid_argument("sectional metric: b = f(a) is not a commuting algebra element");
  }
  const double min_eig = sectional_min_eigenvalue(ctx, metric);
  if (!(min_eig > 1e-10)) {
    throw std::invalid_argument("sectional metric: -ad_a ad_b is not positive definite on "
                                "ann(a)^perp (min eigenvalue " + std::to_string(min_eig) + ")");
  }
}

double sectional_min_eigenvalue(const OrbitContext& ctx, const MetricSpec& metric) {
  if (ctx.orbit_dim() == 0) return std::numeric_limits<double>::infinity();
  const Element& a = ctx.seed();
  const Element b = sectional_b_at(ctx, a, metric);
  const TangentFrame frame(ctx, a);
  const Eigen::MatrixXd op = -ctx.algebra().ad_operator(a) * ctx.algebra().ad_operator(b);
  Eigen::MatrixXd r = restricted(op, frame.range_basis());
  r = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(r);
  return solver.eigenvalues().minCoeff();
}

Element sectional_b_at(const OrbitContext& ctx, const Element& x, const MetricSpec& metric) {
  if (metric.kind != MetricKind::Sectional) {
    throw std::invalid_argument("sectional_b_at: metric is not sectional");
  }
  return spectral_function(ctx, x, metric.b_spectral);
}

Element sectional_operator_apply(const Element& x, const Element& b_x, const Element& p) {
  return -commutator(x, commutator(b_x, p));
}

Element cometric_apply(const OrbitContext& ctx, const MetricSpec& metric, const Element& x,
                       const Element& p) {
  if (metric.kind == MetricKind::Normal) return commutator(commutator(x, p), x);
  return sectional_operator_apply(x, sectional_b_at(ctx, x, metric), p);
}

double metric_K_ab(const OrbitContext& ctx, const Element& x, const Element& eta1,
                   const Element& eta2, const MetricSpec& metric) {
  if (metric.kind == MetricKind::Normal) return normal_metric(ctx, x, eta1, eta2);
  const Element b_x = sectional_b_at(ctx, x, metric);
  const TangentFrame frame(ctx, x);
  const Algebra& alg = ctx.algebra();
  const Eigen::MatrixXd& r = frame.range_basis();
  const Eigen::MatrixXd ad_b = restricted(alg.ad_operator(b_x), r);
  const Coords c1 = alg.coords(eta1);
  const Coords c2 = alg.coords(eta2);
  const Coords pre1 = r * ad_b.partialPivLu().solve(r.transpose() * c1);
  const Coords pre2 = alg.coords(ad_inverse(ctx, x, eta2));
  return pre1.dot(pre2);
}

double spectrum_drift(const OrbitContext& ctx, const Element& x) {
  const Eigen::VectorXd lambda = skew_eigen(x).lambda;
  return (lambda - ctx.seed_eigenvalues()).cwiseAbs().maxCoeff();
}

double ann_residual(const OrbitContext& ctx, const PhasePoint& point) {
  const Coords p = ctx.algebra().coords(point.p);
  const double nrm = p.norm();
  if (nrm == 0.0) return 0.0;
  const TangentFrame frame(ctx, point.x);
  return frame.project_ann(p).norm() / nrm;
}

}  // namespace magflow

namespace magflow {

PhasePoint random_phase_point(const OrbitContext& ctx, std::uint64_t seed, double p_norm) {
  const Algebra& alg = ctx.algebra();
  PhasePoint pt;
  pt.x = adjoint_action(random_group_element(alg, seed), ctx.seed());
  const TangentFrame frame(ctx, pt.x);
  Coords p = frame.project_ann_perp(alg.coords(random_element(alg, seed + 1)));
  const double nrm = p.norm();
  if (nrm > 0.0) p *= p_norm / nrm;
  pt.p = alg.from_coords(p);
  return pt;
}

}  // namespace magflow
