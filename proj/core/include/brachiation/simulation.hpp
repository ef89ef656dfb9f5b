#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brachiation/cable.hpp"
#include "brachiation/control.hpp"
#include "brachiation/dynamics.hpp"
#include "brachiation/trajectory.hpp"

namespace brachiation {

enum class PlantKind { kSpringDamper, kFullCable };
enum class ControllerKind { kAdaptiveRobust, kFeedbackLinearization };

const char* to_string(PlantKind kind);
const char* to_string(ControllerKind kind);

/// F_d(t) = amplitude sin(2 pi frequency t). Applied to surrogate plants only.
struct Disturbance {
  double amplitude = 0.0;     // N
  double frequency_hz = 0.0;  // Hz

  bool active() const { return amplitude != 0.0; }
  double at(double t) const;
};

/// Thresholds of a successful grab.
struct GrabCriteria {
  double capture_radius = 0.10;  // m
  double max_tip_speed = 3.0;    // m/s
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg(double degrees) { return degrees * kPi / 180.0; }
inline constexpr double to_deg(double radians) { return radians * 180.0 / kPi; }

/// Everything that determines an episode.
struct Scenario {
  PlantKind plant = PlantKind::kSpringDamper;
  RobotParams robot;
  SpringDamperParams spring_damper;  // surrogate plant truth
  CableParams cable;
  double station_x = 2.0;  // m, pivot position along the cable at release
  RobotState initial;
  ControllerKind controller = ControllerKind::kAdaptiveRobust;
  ControllerGains gains;
  BaselineGains baseline;
  UncertainParams guess{Vec3(400.0, 12.0, 400.0 * 1.6)};
  Disturbance disturbance;
  OutputTrajectory reference = quintic_profile(deg(-97.0), deg(94.0), 1.1);
  double horizon = 1.1;         // s per swing
  int swings = 1;
  double pause = 1.0;           // s between swings
  double dt = 1e-4;             // s, robot integration step
  double control_period = 1e-3;  // s, zero-order hold of u
  double log_rate = 1000.0;     // Hz
  GrabCriteria grab;
  bool record_cable = false;    // keep node positions at the log rate
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Sampled episode state. V is NaN when the plant truth is not known.
struct LogRow {
  double t = 0.0;
  RobotState state;
  double y = 0.0;
  double ydot = 0.0;
  double y_d = 0.0;
  double yd_dot = 0.0;
  double u = 0.0;
  double u_raw = 0.0;
  double s = 0.0;
  double s_delta = 0.0;
  double k_d = 0.0;
  Vec3 p_hat = Vec3::Zero();
  double F_c = 0.0;
  double F_d = 0.0;
  double V = 0.0;
  bool paused = false;
};

struct Event {
  double t = 0.0;
  std::string name;
};

/// Node positions of the cable at one log instant.
struct CableFrame {
  double t = 0.0;
  std::vector<Vec2> pos;
};

struct Metrics {
  double rmse_y = 0.0;        // deg
  double rmse_ydot = 0.0;     // deg/s
  double rms_u = 0.0;         // N m
  double final_y_error = 0.0;  // deg, |y_d - y| at the last swing sample
  bool success = false;
};

struct GrabResult {
  bool success = false;
  double distance = 0.0;    // m, tip to the cable curve or surrogate line
  double tip_speed = 0.0;   // m/s
  bool far_side = false;
  Vec2 point = Vec2::Zero();  // grab point, the swing-gripper tip
};

struct SwingSummary {
  int index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double pivot_x = 0.0;  // m, at release
  Metrics metrics;
  GrabResult grab;
};

struct EpisodeLog {
  std::vector<LogRow> rows;
  std::vector<Event> events;
  std::vector<CableFrame> cable_frames;
  std::vector<SwingSummary> swings;
  Metrics metrics;
  bool aborted = false;
  double start_x = 0.0;  // m, pivot at the first release
  double end_x = 0.0;    // m, pivot after the last completed swap or swing

  double progress() const { return end_x - start_x; }
};

/// Plant configuration plus the pieces of state that evolve in an episode.
struct World {
  RobotState robot;
  ControllerState controller;
  double pivot_x = 0.0;
  std::optional<CableState> cable;  // full-cable plants only
};

/// What the plant is doing during a step.
struct StepInput {
  double u = 0.0;               // held torque
  double t_swing = 0.0;         // s, time since release, for the reference
  double t_episode = 0.0;       // s, for the disturbance
  bool adapting = false;        // integrate p_hat and k_d
  bool braked = false;          // joints locked, pivot still moves
};

/// One fixed RK4 step of the robot and adaptation states with u held, then
/// the cable substeps for full-cable plants. Throws SingularityError from the
/// control-affine terms when adaptation needs them.
void integrate_step(const Scenario& scenario, const RobotModel& model, World& world,
                    const StepInput& input, double dt);

/// Vertical force on the pivot from the surrogate or the cable.
double plant_force(const Scenario& scenario, const World& world, const RobotState& robot,
                   double t_episode);

/// Initial world: relaxed cable under the robot weight (full cable, whose
/// attachment height replaces the initial z_g), controller at the guess.
World initial_world(const Scenario& scenario, const RobotModel& model);

/// Far-side, capture-radius and tip-speed test at the end of a swing. The
/// surrogate cable is the horizontal line through the current pivot.
GrabResult grab_check(const RobotModel& model, const RobotState& state, double pivot_x,
                      const CableState* cable, const GrabCriteria& criteria);

struct SwapResult {
  RobotState state;
  double pivot_x = 0.0;
};

/// Re-labels the robot so the swing gripper becomes the pivot. Link endpoint
/// positions are unchanged. Velocities are unchanged up to the horizontal
/// velocity of the grasping tip, which the vertically sliding pivot cannot keep.
SwapResult swap_grippers(const RobotModel& model, const RobotState& state, double pivot_x);

/// A single swing over the scenario horizon (ignores `swings`).
EpisodeLog run_swing(const Scenario& scenario);

/// Up to `swings` swings with braked pauses and gripper swaps in between.
/// Stops at the first failed grab or abort.
EpisodeLog run_continuous(const Scenario& scenario);

/// RMS values over non-paused rows. Throws std::invalid_argument when no
/// such row exists.
Metrics compute_metrics(const std::vector<LogRow>& rows);
Metrics compute_metrics(const EpisodeLog& log);

/// Gain that dominates the scenario's disturbance amplitude over the output
/// sensitivity range of the robot; used as the reference k_d in V.
double lyapunov_reference_gain(const RobotModel& model, const Scenario& scenario);

}  // namespace brachiation
