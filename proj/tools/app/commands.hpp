#pragma once

#include <filesystem>
#include <optional>

#include "config.hpp"

namespace magflow::app {

enum ExitCode : int {
  kSuccess = 0,
  kChecksFailed = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

/// Per-epsilon run with everything the reports need.
struct CaseResult {
  double epsilon = 0.0;
  Trajectory trajectory;
  ConservationReport report;
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  double shift_drift = 0.0;
  double max_constraint_residual = 0.0;
  double curvature_proxy = 0.0;
  std::optional<int> delta;
  double runtime_seconds = 0.0;
};

CaseResult run_case(const ExperimentConfig& config, const OrbitContext& ctx, double eps);

/// Writes trajectory.csv and summary.json for one case into `dir`.
void write_case(const ExperimentConfig& config, const OrbitContext& ctx, const CaseResult& result,
                const std::filesystem::path& dir);

int cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_verify(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_delta_report(const ExperimentConfig& config, const std::filesystem::path& out);

/// Names accepted in verify.checks, in run order.
std::vector<std::string> check_names();

/// Full command line entry point (subcommand plus flags).
int run_cli(int argc, char** argv);

}  // namespace magflow::app
