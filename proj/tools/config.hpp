#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brachiation/monte_carlo.hpp"
#include "brachiation/simulation.hpp"

namespace brachiation::cli {

/// Which controllers a swing command runs.
enum class ControllerChoice { kAdaptiveRobust, kFeedbackLinearization, kBoth };

/// A scenario plus the run-level settings around it.
struct RunConfig {
  Scenario scenario;
  ControllerChoice controllers = ControllerChoice::kAdaptiveRobust;
  InitialRanges ranges;
  int monte_carlo_runs = 20;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  double reference_y0 = deg(-97.0);  // rad
  double reference_yf = deg(94.0);   // rad
  std::optional<std::filesystem::path> reference_file;
  bool horizon_set = false;

  /// Builds the reference and checks every invariant. Throws ConfigError.
  void finalize();
};

/// One documented configuration key.
struct KeyInfo {
  std::string_view key;
  std::string_view unit;
  std::string_view description;
};

const std::vector<KeyInfo>& config_keys();

/// Multi-line listing of every key with its unit, for --help.
std::string describe_keys();

/// Sets one key from its text value. Throws ConfigError on unknown keys and
/// malformed values.
void apply(RunConfig& config, std::string_view key, std::string_view value);

/// Reads a sectioned key = value document. '#' and ';' start comments and
/// values may be double-quoted. Throws ConfigError.
void apply_file(RunConfig& config, const std::filesystem::path& path);

/// "theta1_deg,theta2_deg,z_g[,dtheta1_deg_s,dtheta2_deg_s,dz_g]".
RobotState parse_initial_condition(std::string_view text, std::string_view key);

ControllerChoice parse_controller_choice(std::string_view text, std::string_view key);
PlantKind parse_plant(std::string_view text, std::string_view key);

}  // namespace brachiation::cli
