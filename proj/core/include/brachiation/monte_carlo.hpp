#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "brachiation/simulation.hpp"

namespace brachiation {

/// Uniform initial-angle box. z_g and the rates come from the base scenario.
struct InitialRanges {
  double theta1_min = deg(-60.0);
  double theta1_max = deg(-30.0);
  double theta2_min = deg(-120.0);
  double theta2_max = deg(-60.0);

  void validate() const;
};

struct MonteCarloRun {
  int index = 0;
  RobotState initial;
  Metrics adaptive;
  Metrics baseline;
};

/// One line of the per-controller summary table. RMS columns pool the per-run values
/// as sqrt(mean(x^2)).
struct AggregateRow {
  ControllerKind controller = ControllerKind::kAdaptiveRobust;
  double rms_u = 0.0;
  double rmse_y = 0.0;
  double rmse_ydot = 0.0;
  int successes = 0;
  int runs = 0;
};

struct MonteCarloOptions {
  unsigned threads = 1;
  bool keep_logs = false;
};

struct MonteCarloResult {
  std::vector<MonteCarloRun> runs;
  std::array<AggregateRow, 2> aggregate;  // adaptive-robust, feedback-linearization
  std::vector<EpisodeLog> adaptive_logs;  // filled with keep_logs
  std::vector<EpisodeLog> baseline_logs;
};

/// Initial state of run `index`: angles drawn from `ranges` on that run's
/// own stream, everything else from `base`.
RobotState draw_initial_condition(const RobotState& base, const InitialRanges& ranges,
                                  std::uint64_t seed, int index);

/// Runs both controllers from each of `n` drawn initial conditions. Runs may
/// execute in parallel; results are ordered by run index.
MonteCarloResult monte_carlo(const Scenario& base, const InitialRanges& ranges, int n,
                             std::uint64_t seed, const MonteCarloOptions& options = {});

AggregateRow aggregate(ControllerKind controller, const std::vector<Metrics>& runs);

}  // namespace brachiation
