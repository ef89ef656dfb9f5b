#include "brachiation/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "brachiation/errors.hpp"
#include "brachiation/rk4.hpp"

namespace brachiation {

namespace {

using Augmented = Eigen::Matrix<double, 10, 1>;

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

// Number of whole steps of `dt` in `span`, or -1 when span is not a multiple.
long whole_steps(double span, double dt) {
  const double ratio = span / dt;
  const long n = std::lround(ratio);
  return std::abs(ratio - static_cast<double>(n)) < 1e-6 ? n : -1;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a == -kPi ? kPi : a;
}

Augmented pack(const World& world) {
  Augmented x;
  x << world.robot.q, world.robot.qdot, world.controller.p_hat, world.controller.k_d;
  return x;
}

class EpisodeRunner {
 public:
  explicit EpisodeRunner(const Scenario& scenario)
      : sc_(scenario), model_(scenario.robot), world_(initial_world(scenario, model_)) {
    steps_per_control_ = whole_steps(sc_.control_period, sc_.dt);
    steps_per_log_ = whole_steps(1.0 / sc_.log_rate, sc_.dt);
    const double rate = 1.0 / sc_.dt;
    step_rate_ = std::abs(rate - std::round(rate)) < 1e-9 ? std::round(rate) : 0.0;
    truth_known_ = sc_.plant == PlantKind::kSpringDamper &&
                   sc_.controller == ControllerKind::kAdaptiveRobust;
    p_true_ = UncertainParams::from(sc_.spring_damper).p;
    if (truth_known_) k_ref_ = lyapunov_reference_gain(model_, sc_);
    log_.start_x = world_.pivot_x;
    log_.end_x = world_.pivot_x;
  }

  EpisodeLog run(int swings) {
    for (int i = 0; i < swings; ++i) {
      const bool ok = run_phase(i);
      if (!ok) break;
      const GrabResult& grab = log_.swings.back().grab;
      log_.end_x = grab.point.x();
      if (i + 1 == swings) break;
      if (!run_pause()) break;
      swap();
    }
    finish(swings);
    return std::move(log_);
  }

 private:
  double time_of(long n) const {
    return step_rate_ > 0.0 ? static_cast<double>(n) / step_rate_
                            : static_cast<double>(n) * sc_.dt;
  }

  void event(const std::string& name) { log_.events.push_back({time_of(n_), name}); }

  ControlOutput control(const OutputTarget& target) const {
    if (sc_.controller == ControllerKind::kAdaptiveRobust) {
      return adaptive_robust_control(model_, world_.robot, target, world_.controller, sc_.gains);
    }
    return feedback_linearization_control(model_, world_.robot, target, sc_.guess, sc_.baseline);
  }

  // Swing rows replace a row already written at the same instant; pause rows
  // never do.
  void record(const OutputTarget& target, const ControlOutput& out, bool paused) {
    if (n_ % steps_per_log_ != 0) return;
    const bool duplicate = n_ == last_logged_;
    if (duplicate && paused) return;
    LogRow row;
    row.t = time_of(n_);
    row.state = world_.robot;
    row.y = output_angle(world_.robot.q);
    row.ydot = output_rate(world_.robot);
    row.y_d = target.y_d;
    row.yd_dot = target.yd_dot;
    row.u = paused ? 0.0 : u_;
    row.u_raw = paused ? 0.0 : out.diag.u_raw;
    row.s = out.diag.s;
    row.s_delta = out.diag.s_delta;
    row.k_d = world_.controller.k_d;
    row.p_hat = world_.controller.p_hat;
    row.F_c = plant_force(sc_, world_, world_.robot, row.t);
    row.F_d = sc_.plant == PlantKind::kSpringDamper ? sc_.disturbance.at(row.t) : 0.0;
    row.V = truth_known_ ? lyapunov_value(out.diag.s_delta, p_true_ - world_.controller.p_hat,
                                          world_.controller.k_d - k_ref_, sc_.gains.gamma)
                         : std::numeric_limits<double>::quiet_NaN();
    row.paused = paused;
    if (duplicate) {
      log_.rows.back() = row;
    } else {
      log_.rows.push_back(row);
    }
    if (sc_.record_cable && world_.cable) {
      CableFrame frame{row.t, world_.cable->pos};
      if (duplicate && !log_.cable_frames.empty()) {
        log_.cable_frames.back() = std::move(frame);
      } else {
        log_.cable_frames.push_back(std::move(frame));
      }
    }
    last_logged_ = n_;
  }

  void step(const StepInput& input) {
    integrate_step(sc_, model_, world_, input, sc_.dt);
    ++n_;
    if (!world_.robot.finite() || !world_.controller.p_hat.allFinite()) {
      throw SingularityError("state diverged");
    }
  }

  // Returns false when the swing aborted or the grab failed.
  bool run_phase(int index) {
    SwingSummary summary;
    summary.index = index;
    summary.t_start = time_of(n_);
    summary.pivot_x = world_.pivot_x;
    const std::size_t first_row = log_.rows.size() - (last_logged_ == n_ ? 1 : 0);
    const long steps = whole_steps(sc_.horizon, sc_.dt);
    event("release");
    bool aborted = false;
    try {
      ControlOutput out;
      OutputTarget target;
      for (long k = 0;; ++k) {
        const double t_swing = static_cast<double>(k) * sc_.dt;
        if (k % steps_per_control_ == 0 || k == steps) {
          target = sc_.reference.sample(t_swing);
          out = control(target);
          if (k < steps) {
            u_ = out.u;
            if (out.diag.saturated && !saturated_) event("saturation");
            saturated_ = out.diag.saturated;
          }
        }
        record(target, out, false);
        if (k == steps) break;
        StepInput in;
        in.u = u_;
        in.t_swing = t_swing;
        in.t_episode = time_of(n_);
        in.adapting = sc_.controller == ControllerKind::kAdaptiveRobust;
        step(in);
      }
    } catch (const SingularityError&) {
      event("singularity_abort");
      aborted = true;
    }
    summary.t_end = time_of(n_);
    const std::vector<LogRow> rows(log_.rows.begin() + static_cast<long>(first_row),
                                   log_.rows.end());
    if (!rows.empty()) summary.metrics = compute_metrics(rows);
    if (!aborted) {
      summary.grab = grab_check(model_, world_.robot, world_.pivot_x,
                                world_.cable ? &*world_.cable : nullptr, sc_.grab);
      event(summary.grab.success ? "grab" : "grab_fail");
    }
    summary.metrics.success = summary.grab.success;
    log_.swings.push_back(summary);
    log_.aborted = log_.aborted || aborted;
    return summary.grab.success;
  }

  bool run_pause() {
    const long steps = whole_steps(sc_.pause, sc_.dt);
    world_.robot.qdot[0] = 0.0;
    world_.robot.qdot[1] = 0.0;
    u_ = 0.0;
    saturated_ = false;
    event("pause_start");
    try {
      for (long k = 0;; ++k) {
        const OutputTarget target = sc_.reference.sample(sc_.horizon + static_cast<double>(k) * sc_.dt);
        ControlOutput out;
        out.diag.e = target.y_d - output_angle(world_.robot.q);
        out.diag.edot = target.yd_dot - output_rate(world_.robot);
        out.diag.s = sliding_variable(out.diag.e, out.diag.edot, sc_.gains.lambda);
        out.diag.s_delta = boundary_layer_trajectory(out.diag.s, sc_.gains.phi);
        record(target, out, true);
        if (k == steps) break;
        StepInput in;
        in.t_episode = time_of(n_);
        in.braked = true;
        step(in);
      }
    } catch (const SingularityError&) {
      event("singularity_abort");
      log_.aborted = true;
      return false;
    }
    event("pause_end");
    return true;
  }

  void swap() {
    const SwapResult sw = swap_grippers(model_, world_.robot, world_.pivot_x);
    world_.robot = sw.state;
    world_.pivot_x = sw.pivot_x;
    if (world_.cable) {
      const std::size_t node = nearest_interior_node(*world_.cable, sw.pivot_x);
      reattach(*world_.cable, node, sw.state.q[2], sw.state.qdot[2]);
    }
    event("swap");
  }

  void finish(int swings) {
    bool all = static_cast<int>(log_.swings.size()) == swings && !log_.aborted;
    for (const auto& s : log_.swings) all = all && s.grab.success;
    if (!log_.rows.empty()) {
      bool any_active = false;
      for (const auto& r : log_.rows) any_active = any_active || !r.paused;
      if (any_active) log_.metrics = compute_metrics(log_.rows);
    }
    log_.metrics.success = all;
  }

  const Scenario& sc_;
  RobotModel model_;
  World world_;
  EpisodeLog log_;
  long n_ = 0;
  long last_logged_ = -1;
  long steps_per_control_ = 1;
  long steps_per_log_ = 1;
  double step_rate_ = 0.0;
  double u_ = 0.0;
  bool saturated_ = false;
  bool truth_known_ = false;
  Vec3 p_true_ = Vec3::Zero();
  double k_ref_ = 0.0;
};

}  // namespace

const char* to_string(PlantKind kind) {
  return kind == PlantKind::kSpringDamper ? "spring-damper" : "full-cable";
}

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::kAdaptiveRobust ? "adaptive-robust" : "feedback-linearization";
}

double Disturbance::at(double t) const {
  return amplitude * std::sin(2.0 * kPi * frequency_hz * t);
}

void Scenario::validate() const {
  robot.validate();
  RobotModel check(robot);
  spring_damper.validate();
  if (plant == PlantKind::kFullCable) {
    cable.validate();
    require(station_x > cable.support_left.x() && station_x < cable.support_right.x(),
            "episode.station_x", "must lie strictly between the supports");
  }
  gains.validate();
  baseline.validate();
  require(initial.finite(), "episode.ic", "must be finite");
  require(guess.p.allFinite(), "guess", "must be finite");
  require(std::isfinite(disturbance.amplitude), "disturbance.amplitude", "must be finite");
  require(disturbance.frequency_hz >= 0.0, "disturbance.frequency", "must be >= 0 Hz");
  require(horizon > 0.0, "episode.horizon", "must be > 0 s");
  require(swings >= 1, "episode.swings", "must be >= 1");
  require(pause >= 0.0, "episode.pause", "must be >= 0 s");
  require(dt > 0.0, "episode.dt", "must be > 0 s");
  require(whole_steps(horizon, dt) > 0, "episode.horizon", "must be a multiple of dt");
  require(whole_steps(pause, dt) >= 0, "episode.pause", "must be a multiple of dt");
  require(control_period >= dt && whole_steps(control_period, dt) > 0, "episode.control_period",
          "must be a positive multiple of dt");
  require(log_rate > 0.0 && whole_steps(1.0 / log_rate, dt) > 0, "output.log_rate",
          "log period must be a positive multiple of dt");
  require(grab.capture_radius > 0.0, "grab.capture_radius", "must be > 0 m");
  require(grab.max_tip_speed > 0.0, "grab.max_tip_speed", "must be > 0 m/s");
}

double plant_force(const Scenario& scenario, const World& world, const RobotState& robot,
                   double t_episode) {
  const double z = robot.q[2];
  const double zdot = robot.qdot[2];
  if (scenario.plant == PlantKind::kSpringDamper) {
    return cable_surrogate_force(z, zdot, scenario.spring_damper,
                                 scenario.disturbance.at(t_episode));
  }
  return attachment_reaction(*world.cable, scenario.cable, z, zdot);
}

World initial_world(const Scenario& scenario, const RobotModel& model) {
  World w;
  w.robot = scenario.initial;
  w.pivot_x = scenario.station_x;
  w.controller = ControllerState::initial(scenario.guess, scenario.gains);
  if (scenario.controller == ControllerKind::kFeedbackLinearization) w.controller.k_d = 0.0;
  if (scenario.plant == PlantKind::kFullCable) {
    const CableState chord = straight_cable(scenario.cable);
    const std::size_t node = nearest_interior_node(chord, scenario.station_x);
    const double weight = model.params().total_mass() * model.params().gravity;
    w.cable = static_equilibrium(scenario.cable, NodeLoad{node, weight});
    w.pivot_x = w.cable->pos[node].x();
    w.robot.q[2] = w.cable->pos[node].y();
    w.cable->vel[node] = Vec2(0.0, w.robot.qdot[2]);
  }
  return w;
}

void integrate_step(const Scenario& scenario, const RobotModel& model, World& world,
                    const StepInput& input, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const double mass = model.params().total_mass();
  const double g = model.params().gravity;
  const auto& gains = scenario.gains;

  const auto f = [&](double tau, const Augmented& x) -> Augmented {
    const RobotState r{x.segment<3>(0), x.segment<3>(3)};
    const double F_c = plant_force(scenario, world, r, input.t_episode + tau);
    Augmented d = Augmented::Zero();
    d.segment<3>(0) = r.qdot;
    if (input.braked) {
      d[0] = 0.0;
      d[1] = 0.0;
      d[5] = F_c / mass - g;
    } else {
      d.segment<3>(3) = model.forward_dynamics(r, input.u, F_c);
    }
    if (input.adapting) {
      const OutputTarget target = scenario.reference.sample(input.t_swing + tau);
      const AffineTerms terms = model.affine_terms(r);
      const double e = target.y_d - output_angle(r.q);
      const double edot = target.yd_dot - output_rate(r);
      const double s_delta =
          boundary_layer_trajectory(sliding_variable(e, edot, gains.lambda), gains.phi);
      const AdaptationRates rates = adaptation_rates(s_delta, terms.h_row, gains);
      d.segment<3>(6) = rates.p_hat_rate;
      d[9] = rates.k_d_rate;
    }
    return d;
  };

  const double z_begin = world.robot.q[2];
  const Augmented next = rk4_step(pack(world), 0.0, dt, f);
  world.robot.q = next.segment<3>(0);
  world.robot.qdot = next.segment<3>(3);
  if (input.braked) {
    world.robot.qdot[0] = 0.0;
    world.robot.qdot[1] = 0.0;
  }
  if (input.adapting) {
    world.controller.p_hat = next.segment<3>(6);
    world.controller.k_d = next[9];
  }
  if (world.cable) {
    advance_cable(*world.cable, scenario.cable, dt, z_begin, world.robot.q[2]);
    world.cable->vel[*world.cable->attach_index] = Vec2(0.0, world.robot.qdot[2]);
  }
}

GrabResult grab_check(const RobotModel& model, const RobotState& state, double pivot_x,
                      const CableState* cable, const GrabCriteria& criteria) {
  const LinkPoints pts = model.kinematics(state.q, pivot_x);
  const LinkPoints vel = model.point_velocities(state);
  GrabResult r;
  r.point = pts.tip;
  r.tip_speed = vel.tip.norm();
  r.far_side = pts.tip.x() > pivot_x;
  r.distance = cable ? distance_to_cable(*cable, pts.tip).distance
                     : std::abs(pts.tip.y() - state.q[2]);
  r.success = r.far_side && r.distance <= criteria.capture_radius &&
              r.tip_speed < criteria.max_tip_speed;
  return r;
}

SwapResult swap_grippers(const RobotModel& model, const RobotState& state, double pivot_x) {
  const LinkPoints pts = model.kinematics(state.q, pivot_x);
  const LinkPoints vel = model.point_velocities(state);
  SwapResult out;
  out.pivot_x = pts.tip.x();
  // The new first link points from the old tip back to the elbow.
  out.state.q[0] = wrap_angle(state.q[0] + state.q[1] - kPi);
  out.state.q[1] = -state.q[1];
  out.state.q[2] = pts.tip.y();
  out.state.qdot[0] = state.qdot[0] + state.qdot[1];
  out.state.qdot[1] = -state.qdot[1];
  out.state.qdot[2] = vel.tip.y();
  return out;
}

EpisodeLog run_swing(const Scenario& scenario) {
  scenario.validate();
  return EpisodeRunner(scenario).run(1);
}

EpisodeLog run_continuous(const Scenario& scenario) {
  scenario.validate();
  return EpisodeRunner(scenario).run(scenario.swings);
}

Metrics compute_metrics(const std::vector<LogRow>& rows) {
  double sum_e = 0.0;
  double sum_edot = 0.0;
  double sum_u = 0.0;
  std::size_t count = 0;
  const LogRow* last = nullptr;
  for (const auto& r : rows) {
    if (r.paused) continue;
    const double e = to_deg(r.y_d - r.y);
    const double edot = to_deg(r.yd_dot - r.ydot);
    sum_e += e * e;
    sum_edot += edot * edot;
    sum_u += r.u * r.u;
    ++count;
    last = &r;
  }
  if (count == 0) throw std::invalid_argument("metrics need at least one swing row");
  const double n = static_cast<double>(count);
  Metrics m;
  m.rmse_y = std::sqrt(sum_e / n);
  m.rmse_ydot = std::sqrt(sum_edot / n);
  m.rms_u = std::sqrt(sum_u / n);
  m.final_y_error = std::abs(to_deg(last->y_d - last->y));
  return m;
}

Metrics compute_metrics(const EpisodeLog& log) {
  Metrics m = compute_metrics(log.rows);
  m.success = log.metrics.success;
  return m;
}

double lyapunov_reference_gain(const RobotModel& model, const Scenario& scenario) {
  if (!scenario.disturbance.active()) return 0.0;
  // beta depends on the joint angles only.
  double beta_max = 0.0;
  constexpr int kGrid = 73;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      RobotState s;
      s.q = Vec3(-kPi + 2.0 * kPi * i / (kGrid - 1), -kPi + 2.0 * kPi * j / (kGrid - 1), 0.0);
      try {
        beta_max = std::max(beta_max, std::abs(model.affine_terms(s).beta));
      } catch (const SingularityError&) {
      }
    }
  }
  return ideal_robust_gain(beta_max, scenario.disturbance.amplitude, scenario.gains.k_d0);
}

}  // namespace brachiation
