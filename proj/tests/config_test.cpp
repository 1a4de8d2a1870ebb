#include <gtest/gtest.h>

#include <config.hpp>

namespace magflow::app {
namespace {

const char* kMinimal = R"({"algebra": {"family": "su", "n": 3}, "seed_a": {"spectrum": [1.0, 0.3, -1.3]}})";

std::string where_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "<no error>";
}

TEST(Config, MinimalUsesDefaults) {
  const ExperimentConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.family, Family::SpecialUnitary);
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.epsilons, std::vector<double>{0.0});
  EXPECT_EQ(c.integrator.dt, 1e-3);
  EXPECT_EQ(c.integrator.t_end, 10.0);
  EXPECT_EQ(c.metric.kind, MetricKind::Normal);
  EXPECT_FALSE(c.verify.checks.has_value());
  const OrbitContext ctx = make_context(c);
  EXPECT_EQ(ctx.orbit_dim(), 6);
  EXPECT_NEAR(c.seed_a.matrix()(2, 2).imag(), -1.3, 0);
}

TEST(Config, SoSpectrumBuildsRotationBlocks) {
  const ExperimentConfig c =
      parse_config(R"({"algebra": {"family": "so", "n": 4}, "seed_a": {"spectrum": [1.0, 0.4]}})");
  EXPECT_EQ(c.seed_a.matrix()(1, 0).real(), 1.0);
  EXPECT_EQ(c.seed_a.matrix()(2, 3).real(), -0.4);
  EXPECT_EQ(make_context(c).orbit_dim(), 4);
}

TEST(Config, FieldPathsInErrors) {
  EXPECT_EQ(where_of(R"({"algebra": {"family": "sp", "n": 3}, "seed_a": {"spectrum": [1, 0, -1]}})"),
            "algebra.family");
  EXPECT_EQ(where_of(R"({"algebra": {"family": "su", "n": 3}, "seed_a": {"spectrum": [1, 0, -2]}})"),
            "seed_a.spectrum");
  EXPECT_EQ(where_of(R"({"algebra": {"family": "su", "n": 3}})"), "seed_a");
  EXPECT_EQ(where_of(std::string(kMinimal).insert(1, R"("colour": 1, )")), "colour");
  EXPECT_EQ(where_of(std::string(kMinimal).insert(1, R"("integrator": {"dt": -1}, )")), "integrator.dt");
  EXPECT_EQ(where_of(std::string(kMinimal).insert(1, R"("integrator": {"stepsize": 1}, )")),
            "integrator.stepsize");
  EXPECT_EQ(where_of(std::string(kMinimal).insert(1, R"("epsilon": [0.1, "x"], )")), "epsilon[1]");
  EXPECT_EQ(where_of(std::string(kMinimal).insert(1, R"("metric": {"kind": "sectional"}, )")),
            "metric.b_spectral");
  EXPECT_EQ(where_of(std::string(kMinimal).insert(1, R"("initial_p": {"coords": [1, 2]}, )")),
            "initial_p.coords");
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_config("{\n  \"algebra\": {\"family\": \"su\",\n  \"n\": 3}}\n  oops");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
  }
}

TEST(Config, SemanticErrorsSurfaceAsConfigErrors) {
  ExperimentConfig c = parse_config(
      R"({"algebra": {"family": "su", "n": 3}, "seed_a": {"spectrum": [1.0, 1.0, -2.0]},
          "metric": {"kind": "sectional", "b_spectral": [1.0, 0.0, -1.0]}})");
  EXPECT_THROW(make_context(c), ConfigError);

  c = parse_config(std::string(kMinimal).insert(1, R"("initial_p": {"coords": [0, 0, 0, 0, 0, 0, 0, 1]}, )"));
  const OrbitContext ctx = make_context(c);
  try {
    make_initial_point(c, ctx);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.where(), "initial_p.coords");
  }

  c = parse_config(std::string(kMinimal).insert(1, R"("integrator": {"dt": 1e-15}, )"));
  try {
    make_problem(c, ctx, 0.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.where(), "integrator.dt");
  }
}

TEST(Config, InitialPointIsTangentAndSeeded) {
  ExperimentConfig c = parse_config(std::string(kMinimal).insert(1, R"("initial_x": "random", )"));
  const OrbitContext ctx = make_context(c);
  const PhasePoint a = make_initial_point(c, ctx);
  EXPECT_LT(spectrum_drift(ctx, a.x), 1e-12);
  EXPECT_LT(ann_residual(ctx, a), 1e-12);
  EXPECT_NEAR(a.p.norm(), 1.0, 1e-12);
  c.rng_seed = 2;
  EXPECT_GT((make_initial_point(c, ctx).x - a.x).norm(), 1e-3);
}

TEST(Config, FaultNames) {
  EXPECT_EQ(parse_fault(""), FaultInjection::None);
  EXPECT_EQ(parse_fault("flip-magnetic-sign"), FaultInjection::FlipMagneticSign);
  EXPECT_THROW(parse_fault("flip"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"su3_normal.json", "su3_verify.json", "su3_sectional.json", "so3_sphere.json",
                           "so3_sweep.json"}) {
    const ExperimentConfig c = load_config(std::filesystem::path(MAGFLOW_CONFIG_DIR) / name);
    const OrbitContext ctx = make_context(c);
    EXPECT_NO_THROW(make_problem(c, ctx, c.epsilons.front())) << name;
  }
}

}  // namespace
}  // namespace magflow::app
