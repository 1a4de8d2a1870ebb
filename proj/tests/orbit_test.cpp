#include <gtest/gtest.h>

#include <algorithm>

#include "test_support.hpp"

namespace magflow {
namespace {

using testing::dist;

/// Random tangent vector [xi, x] at x.
Element random_tangent(const Element& x, const Algebra& alg, std::uint64_t seed) {
  return commutator(random_element(alg, seed), x);
}

TEST(OrbitContext, DimensionsForStandardSeeds) {
  const OrbitContext su3 = testing::su3_regular();
  EXPECT_EQ(su3.ann_dim(), 2);
  EXPECT_EQ(su3.orbit_dim(), 6);
  const OrbitContext so3 = testing::so3_sphere();
  EXPECT_EQ(so3.ann_dim(), 1);
  EXPECT_EQ(so3.orbit_dim(), 2);
  // Non-regular seed: i diag(1, 1, -2) has ann = u(2) of dimension 4.
  const OrbitContext cp2(Algebra(Family::SpecialUnitary, 3), testing::diag_su({1.0, 1.0, -2.0}));
  EXPECT_EQ(cp2.ann_dim(), 4);
  EXPECT_EQ(cp2.orbit_dim(), 4);
  EXPECT_THROW(OrbitContext(Algebra(Family::SpecialUnitary, 3), testing::diag_su({1.0, 1.0, 1.0})),
               std::invalid_argument);
}

TEST(Annihilator, RegularDiagonalSu3IsCartan) {
  const OrbitContext ctx = testing::su3_regular();
  const auto basis = annihilator_basis(ctx, ctx.seed());
  ASSERT_EQ(basis.size(), 2u);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Matrix& m = basis[i].matrix();
    EXPECT_LT((m - Matrix(m.diagonal().asDiagonal())).norm(), 1e-12);
    EXPECT_LT(commutator(basis[i], ctx.seed()).norm(), 1e-10);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      EXPECT_NEAR(inner(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Annihilator, So3IsTheLineThroughX) {
  const OrbitContext ctx = testing::so3_sphere();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const PhasePoint pt = random_phase_point(ctx, s);
    const auto basis = annihilator_basis(ctx, pt.x);
    ASSERT_EQ(basis.size(), 1u);
    EXPECT_NEAR(std::abs(inner(basis[0], pt.x)) / pt.x.norm(), 1.0, 1e-12);
  }
}

TEST(Annihilator, DegeneratePointIsRejected) {
  const OrbitContext ctx = testing::su3_regular();
  EXPECT_THROW(annihilator_basis(ctx, testing::diag_su({1.0, 1.0, -2.0})), DegenerateOrbitPoint);
}

TEST(Projections, SplittingReassemblesAndIsOrthogonal) {
  for (const OrbitContext& ctx : {testing::su3_regular(), testing::so4_regular()}) {
    const Algebra& alg = ctx.algebra();
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Element x = random_phase_point(ctx, s).x;
      const Element v = random_element(alg, s + 1000);
      const Element a = project_ann(ctx, x, v);
      const Element b = project_ann_perp(ctx, x, v);
      EXPECT_LT(dist(a + b, v), 1e-12);
      EXPECT_LT(std::abs(inner(a, b)), 1e-12);
      EXPECT_LT(dist(project_ann(ctx, x, a), a), 1e-12);
      EXPECT_LT(project_ann(ctx, x, random_tangent(x, alg, s)).norm(), 1e-10);
    }
  }
}

TEST(AdInverse, So3StructureConstants) {
  const OrbitContext ctx(Algebra(Family::SpecialOrthogonal, 3),
                         Algebra(Family::SpecialOrthogonal, 3).basis()[2]);
  const auto& e = ctx.algebra().basis();
  // [E3, E1] = E2
  EXPECT_LT(dist(ad_inverse(ctx, e[2], e[1]), e[0]), 1e-14);
  EXPECT_LT(dist(ad_inverse(ctx, e[2], e[0]), -e[1]), 1e-14);
}

TEST(AdInverse, RoundTripLinearityAndErrors) {
  const OrbitContext ctx = testing::su3_regular();
  const Algebra& alg = ctx.algebra();
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Element x = random_phase_point(ctx, s).x;
    const Element xi = random_element(alg, s + 7);
    const Element eta = commutator(x, xi);
    const Element back = ad_inverse(ctx, x, eta);
    EXPECT_LT(dist(back, project_ann_perp(ctx, x, xi)), 1e-10);
    EXPECT_LT(dist(commutator(x, back), eta), 1e-10 * eta.norm());
    EXPECT_LT(dist(ad_inverse(ctx, x, 2.5 * eta), 2.5 * back), 1e-12 * std::max(1.0, back.norm()));
  }
  const Element x = ctx.seed();
  EXPECT_THROW(ad_inverse(ctx, x, x), NotInImage);
  EXPECT_EQ(ad_inverse(ctx, x, alg.zero()).norm(), 0.0);
}

TEST(AdInverse, IllConditionedPointIsDegenerate) {
  // Gap 5e-8 passes the singular-value gap check but the condition number is ~3e10.
  const OrbitContext ctx = testing::su3_regular();
  const Element x = testing::diag_su({500.0, 500.0 - 5e-8, -1000.0 + 5e-8});
  EXPECT_THROW(ad_inverse(ctx, x, commutator(x, ctx.algebra().basis()[0])), DegenerateOrbitPoint);
}

TEST(KirillovForm, AntisymmetricWellDefinedAndInvariant) {
  const OrbitContext ctx = testing::su3_regular();
  const Algebra& alg = ctx.algebra();
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Element x = random_phase_point(ctx, s).x;
    const Element xi1 = random_element(alg, s + 1);
    const Element xi2 = random_element(alg, s + 2);
    const Element eta1 = commutator(xi1, x);
    const Element eta2 = commutator(xi2, x);
    const double w = kirillov_form(ctx, x, eta1, eta2);
    EXPECT_NEAR(kirillov_form(ctx, x, eta1, eta1), 0.0, 1e-12);
    EXPECT_NEAR(kirillov_form(ctx, x, eta2, eta1), -w, 1e-12);
    // Preimage freedom: -<x,[xi1 + zeta, xi2]> for zeta in ann(x) and arbitrary xi2.
    const Element zeta = project_ann(ctx, x, random_element(alg, s + 3));
    EXPECT_NEAR(-inner(x, commutator(xi1 + zeta, xi2)), w, 1e-12);
    EXPECT_NEAR(-inner(x, commutator(xi1, xi2)), w, 1e-12);
    const GroupElement g = random_group_element(alg, s + 4);
    EXPECT_NEAR(kirillov_form(ctx, adjoint_action(g, x), adjoint_action(g, eta1),
                              adjoint_action(g, eta2)),
                w, 1e-11);
  }
}

TEST(KirillovForm, So3IsMinusTheAreaForm) {
  const OrbitContext ctx = testing::so3_sphere();
  const Algebra& alg = ctx.algebra();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Element x = random_phase_point(ctx, s).x;
    const Element eta1 = random_tangent(x, alg, s + 1);
    const Element eta2 = random_tangent(x, alg, s + 2);
    const Eigen::Vector3d xv = alg.coords(x), a = alg.coords(eta1), b = alg.coords(eta2);
    EXPECT_NEAR(kirillov_form(ctx, x, eta1, eta2), -xv.dot(a.cross(b)), 1e-12);
  }
}

TEST(NormalMetric, PositiveInvariantAndRoundOnSphere) {
  const OrbitContext sphere = testing::so3_sphere();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Element x = random_phase_point(sphere, s).x;
    const Element eta = random_tangent(x, sphere.algebra(), s);
    // xi = x cross eta is the orthogonal preimage on the unit sphere.
    const Eigen::Vector3d xv = sphere.algebra().coords(x), ev = sphere.algebra().coords(eta);
    EXPECT_NEAR(normal_metric(sphere, x, eta, eta), xv.cross(ev).squaredNorm(), 1e-12);
    EXPECT_NEAR(normal_metric(sphere, x, eta, eta), ev.squaredNorm(), 1e-12);
  }
  const OrbitContext ctx = testing::su3_regular();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Element x = random_phase_point(ctx, s).x;
    const Element eta1 = random_tangent(x, ctx.algebra(), s + 1);
    const Element eta2 = random_tangent(x, ctx.algebra(), s + 2);
    EXPECT_GT(normal_metric(ctx, x, eta1, eta1), 0.0);
    EXPECT_NEAR(normal_metric(ctx, x, eta1, eta2), normal_metric(ctx, x, eta2, eta1), 1e-12);
    const GroupElement g = random_group_element(ctx.algebra(), s);
    EXPECT_NEAR(normal_metric(ctx, adjoint_action(g, x), adjoint_action(g, eta1),
                              adjoint_action(g, eta2)),
                normal_metric(ctx, x, eta1, eta2), 1e-11);
  }
}

TEST(NormalMetric, CometricIsMinusAdSquared) {
  const OrbitContext ctx = testing::su3_regular();
  for (std::uint64_t s = 0; s < 100; ++s) {
    const PhasePoint pt = random_phase_point(ctx, s, 1.5);
    const Element mu = commutator(pt.x, pt.p);
    EXPECT_NEAR(inner(cometric_apply(ctx, MetricSpec::normal(), pt.x, pt.p), pt.p),
                inner(mu, mu), 1e-11);
    // phi_x = -ad_x^{-1} ad_x^{-1} inverts the co-metric on ann(x)^perp.
    const Element w = cometric_apply(ctx, MetricSpec::normal(), pt.x, pt.p);
    const Element back = -ad_inverse(ctx, pt.x, ad_inverse(ctx, pt.x, w));
    EXPECT_LT(dist(back, pt.p), 1e-10);
  }
}

TEST(SectionalMetric, ValidationRejectsBadSpectralData) {
  const OrbitContext ctx = testing::su3_regular();
  EXPECT_NO_THROW(validate_metric(ctx, testing::cubic_sectional(ctx)));
  EXPECT_THROW(validate_metric(ctx, MetricSpec::sectional({1.0, 0.0})), std::invalid_argument);
  EXPECT_THROW(validate_metric(ctx, MetricSpec::sectional({-1.0, 0.0, 2.0})), std::invalid_argument);
  // Decreasing f: -ad_a ad_b negative definite.
  EXPECT_THROW(validate_metric(ctx, MetricSpec::sectional({1.0, 0.0, -1.0})), std::invalid_argument);
  const OrbitContext so4 = testing::so4_regular();
  EXPECT_THROW(validate_metric(so4, MetricSpec::sectional({-1.0, -0.5, 0.4, 1.0})),
               std::invalid_argument);
  EXPECT_NO_THROW(validate_metric(so4, MetricSpec::sectional({-1.2, -0.3, 0.3, 1.2})));
  const OrbitContext cp2(Algebra(Family::SpecialUnitary, 3), testing::diag_su({1.0, 1.0, -2.0}));
  EXPECT_THROW(validate_metric(cp2, MetricSpec::sectional({-2.0, 0.9, 1.1})),
               std::invalid_argument);
  EXPECT_NO_THROW(validate_metric(cp2, MetricSpec::sectional({-3.0, 1.5, 1.5})));
}

TEST(SectionalMetric, BAtSeedIdentityAndEquivariance) {
  const OrbitContext ctx = testing::su3_regular();
  const MetricSpec metric = testing::cubic_sectional(ctx);
  const Element b = sectional_b_at(ctx, ctx.seed(), metric);
  EXPECT_LT(dist(b, testing::diag_su({metric.b_spectral[2], metric.b_spectral[1],
                                      metric.b_spectral[0]})),
            1e-12);
  const auto& l = ctx.seed_eigenvalues();
  const MetricSpec identity = MetricSpec::sectional({l[0], l[1], l[2]});
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Element x = random_phase_point(ctx, s).x;
    const Element bx = sectional_b_at(ctx, x, metric);
    EXPECT_LT(commutator(bx, x).norm(), 1e-10);
    const auto sb = spectrum(bx), s0 = spectrum(b);
    for (std::size_t k = 0; k < sb.size(); ++k) EXPECT_LT(std::abs(sb[k] - s0[k]), 1e-10);
    const GroupElement g = random_group_element(ctx.algebra(), s + 99);
    EXPECT_LT(dist(sectional_b_at(ctx, adjoint_action(g, x), metric), adjoint_action(g, bx)), 1e-10);
    EXPECT_LT(dist(sectional_b_at(ctx, x, identity), x), 1e-12);
  }
}

TEST(SectionalMetric, So4SpectralFunctionStaysReal) {
  const OrbitContext ctx = testing::so4_regular();
  const MetricSpec metric = MetricSpec::sectional({-1.2, -0.3, 0.3, 1.2});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Element x = random_phase_point(ctx, s).x;
    const Element bx = sectional_b_at(ctx, x, metric);
    EXPECT_TRUE(ctx.algebra().contains(bx.matrix(), 1e-12));
    EXPECT_LT(commutator(bx, x).norm(), 1e-10);
  }
}

TEST(SectionalOperator, SymmetricPositiveWithRootSpectrum) {
  const OrbitContext ctx = testing::su3_regular();
  const MetricSpec metric = testing::cubic_sectional(ctx);
  // Root space (j,k): -ad_a ad_b acts by (l_j - l_k)(f_j - f_k), twice each.
  const auto& l = ctx.seed_eigenvalues();
  const auto& f = metric.b_spectral;
  std::vector<double> expected;
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k)
      for (int rep = 0; rep < 2; ++rep) expected.push_back((l[j] - l[k]) * (f[j] - f[k]));
  std::sort(expected.begin(), expected.end());

  const Algebra& alg = ctx.algebra();
  const TangentFrame frame(ctx, ctx.seed());
  const Element b = sectional_b_at(ctx, ctx.seed(), metric);
  const Eigen::MatrixXd& r = frame.range_basis();
  Eigen::MatrixXd op(r.cols(), r.cols());
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    const Element q = alg.from_coords(r.col(j));
    op.col(j) = r.transpose() * alg.coords(sectional_operator_apply(ctx.seed(), b, q));
  }
  EXPECT_LT(testing::max_abs(op - op.transpose()), 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_NEAR(eig.eigenvalues()[k], expected[k], 1e-12);
  }
  EXPECT_NEAR(sectional_min_eigenvalue(ctx, metric), expected.front(), 1e-12);

  for (std::uint64_t s = 0; s < 30; ++s) {
    const PhasePoint a = random_phase_point(ctx, s);
    const Element q = project_ann_perp(ctx, a.x, random_element(alg, s + 5));
    const Element bx = sectional_b_at(ctx, a.x, metric);
    const Element phi_p = sectional_operator_apply(a.x, bx, a.p);
    EXPECT_NEAR(inner(phi_p, q), inner(a.p, sectional_operator_apply(a.x, bx, q)), 1e-12);
    EXPECT_LT(project_ann(ctx, a.x, phi_p).norm(), 1e-10);
    // b = x gives the normal co-metric.
    EXPECT_LT(dist(sectional_operator_apply(a.x, a.x, a.p), commutator(commutator(a.x, a.p), a.x)),
              1e-13);
  }
}

TEST(SectionalMetric, KabConsistency) {
  const OrbitContext ctx = testing::su3_regular();
  const Algebra& alg = ctx.algebra();
  const MetricSpec metric = testing::cubic_sectional(ctx);
  const auto& l = ctx.seed_eigenvalues();
  const MetricSpec identity = MetricSpec::sectional({l[0], l[1], l[2]});
  for (std::uint64_t s = 0; s < 30; ++s) {
    const PhasePoint a = random_phase_point(ctx, s);
    const Element eta1 = random_tangent(a.x, alg, s + 1);
    const Element eta2 = random_tangent(a.x, alg, s + 2);
    EXPECT_NEAR(metric_K_ab(ctx, a.x, eta1, eta2, identity), normal_metric(ctx, a.x, eta1, eta2),
                1e-11);
    EXPECT_NEAR(metric_K_ab(ctx, a.x, eta1, eta2, metric), metric_K_ab(ctx, a.x, eta2, eta1, metric),
                1e-11);
    EXPECT_GT(metric_K_ab(ctx, a.x, eta1, eta1, metric), 0.0);
    const Element bx = sectional_b_at(ctx, a.x, metric);
    const Element q = project_ann_perp(ctx, a.x, random_element(alg, s + 3));
    const Element phi_p = sectional_operator_apply(a.x, bx, a.p);
    const Element phi_q = sectional_operator_apply(a.x, bx, q);
    EXPECT_NEAR(metric_K_ab(ctx, a.x, phi_p, phi_q, metric), inner(phi_p, q), 1e-10);
  }
}

TEST(RandomPhasePoint, SatisfiesConstraints) {
  const OrbitContext ctx = testing::su3_regular();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PhasePoint pt = random_phase_point(ctx, s, 2.0);
    EXPECT_LT(spectrum_drift(ctx, pt.x), 1e-12);
    EXPECT_LT(ann_residual(ctx, pt), 1e-12);
    EXPECT_NEAR(pt.p.norm(), 2.0, 1e-12);
  }
}

}  // namespace
}  // namespace magflow
