#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <magflow/magflow.hpp>

namespace magflow::app {

/// Bad config file or flag. `where` is a dotted field path or "line L, column C".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class InitialX { Seed, Random };

struct OutputOptions {
  bool csv = true;
  bool json = true;
  int subsample = 1;
  bool record_runtime = false;
};

struct VerifyOptions {
  /// Empty optional means every check; an empty list runs nothing.
  std::optional<std::vector<std::string>> checks;
  int samples = 100;
};

struct ExperimentConfig {
  Family family = Family::SpecialUnitary;
  int n = 3;
  Element seed_a;
  MetricSpec metric;
  std::vector<double> epsilons = {0.0};
  bool epsilon_is_list = false;
  InitialX initial_x = InitialX::Seed;
  std::optional<std::vector<double>> initial_p_coords;
  double initial_p_scale = 1.0;
  IntegratorSettings integrator;
  OutputOptions outputs;
  std::uint64_t rng_seed = 1;
  VerifyOptions verify;
  FaultInjection fault = FaultInjection::None;

  Algebra algebra() const { return Algebra(family, n); }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

FaultInjection parse_fault(const std::string& name);
std::string fault_name(FaultInjection fault);

/// Orbit context for the config's seed; reports seed problems as ConfigError.
OrbitContext make_context(const ExperimentConfig& config);

/// Initial phase point; rejects p that is not tangent at x.
PhasePoint make_initial_point(const ExperimentConfig& config, const OrbitContext& ctx);

FlowProblem make_problem(const ExperimentConfig& config, const OrbitContext& ctx, double eps);

}  // namespace magflow::app
