// brachiation-lab: runs the swing, Monte Carlo and continuous experiments and
// the validation suite. Exit codes: 0 ok, 1 config error, 2 grab failure,
// 3 singularity abort, 4 validation failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>

#include "brachiation/episode_io.hpp"
#include "brachiation/errors.hpp"
#include "brachiation/monte_carlo.hpp"
#include "brachiation/simulation.hpp"
#include "config.hpp"
#include "validation_suite.hpp"

namespace brachiation::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitGrab = 2;
constexpr int kExitSingularity = 3;
constexpr int kExitValidation = 4;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string plant;
  std::string controller;
  std::string ic;
  std::string disturbance;
  std::optional<int> swings;
  std::optional<double> torque_limit;
  std::optional<double> log_rate;
  std::optional<int> n;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Config file ([section] key = value)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--plant", o.plant, "spring-damper or full-cable");
  cmd->add_option("--controller", o.controller,
                  "adaptive-robust, feedback-linearization or both");
  cmd->add_option("--ic", o.ic, "theta1_deg,theta2_deg,z_g[,dtheta1,dtheta2,dz_g]");
  cmd->add_option("--disturbance", o.disturbance, "\"A,f\": amplitude N, frequency Hz");
  cmd->add_option("--swings", o.swings, "Number of swings");
  cmd->add_option("--torque-limit", o.torque_limit, "Torque clip, N m");
  cmd->add_option("--log-rate", o.log_rate, "Episode CSV rate, Hz");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) apply_file(c, o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.seed) c.seed = *o.seed;
  if (!o.plant.empty()) c.scenario.plant = parse_plant(o.plant, "--plant");
  if (!o.controller.empty()) c.controllers = parse_controller_choice(o.controller, "--controller");
  if (!o.ic.empty()) c.scenario.initial = parse_initial_condition(o.ic, "--ic");
  if (!o.disturbance.empty()) {
    const auto comma = o.disturbance.find(',');
    if (comma == std::string::npos) throw ConfigError("--disturbance", "expected \"A,f\"");
    apply(c, "disturbance.amplitude", o.disturbance.substr(0, comma));
    apply(c, "disturbance.frequency", o.disturbance.substr(comma + 1));
  }
  if (o.swings) c.scenario.swings = *o.swings;
  if (o.torque_limit) {
    c.scenario.gains.torque_limit = *o.torque_limit;
    c.scenario.baseline.torque_limit = *o.torque_limit;
  }
  if (o.log_rate) c.scenario.log_rate = *o.log_rate;
  if (o.n) c.monte_carlo_runs = *o.n;
  c.finalize();
  return c;
}

unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BRACHIATION_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

// Assumed values, flagged at the top of every report.
std::string report_header(const RunConfig& c) {
  const Scenario& s = c.scenario;
  std::string h;
  h += fmt::format("# plant: {}\n", to_string(s.plant));
  h += fmt::format("# initial state: theta1 {:.2f} deg, theta2 {:.2f} deg, z_g {:.3f} m\n",
                   to_deg(s.initial.q[0]), to_deg(s.initial.q[1]), s.initial.q[2]);
  h += fmt::format("# reference: {} over {:.3f} s\n",
                   s.reference.origin() == TrajectoryOrigin::kLoaded ? "loaded CSV" : "quintic",
                   s.horizon);
  if (s.plant == PlantKind::kFullCable) {
    h += fmt::format(
        "# assumed: supports ({:.2f}, {:.2f}) and ({:.2f}, {:.2f}) m, station x {:.2f} m, "
        "{} segments; initial z_g replaced by the relaxed attachment height\n",
        s.cable.support_left.x(), s.cable.support_left.y(), s.cable.support_right.x(),
        s.cable.support_right.y(), s.station_x, s.cable.n_segments);
  } else {
    h += fmt::format("# spring-damper truth: k_s {} N/m, b_s {} N s/m, z_s {} m\n",
                     s.spring_damper.k_s, s.spring_damper.b_s, s.spring_damper.z_s);
  }
  h += fmt::format("# guess: k_s {} N/m, b_s {} N s/m, k_s z_s {} N\n", s.guess.p[0],
                   s.guess.p[1], s.guess.p[2]);
  if (s.disturbance.active()) {
    h += fmt::format("# disturbance: {} N at {} Hz\n", s.disturbance.amplitude,
                     s.disturbance.frequency_hz);
  }
  h += fmt::format("# grab: radius {} m, tip speed < {} m/s\n", s.grab.capture_radius,
                   s.grab.max_tip_speed);
  return h;
}

std::string metrics_line(const std::string& label, const EpisodeLog& log) {
  const Metrics& m = log.metrics;
  std::string grab = "n/a";
  if (!log.swings.empty()) {
    const GrabResult& g = log.swings.back().grab;
    grab = fmt::format("{} (distance {:.3f} m, tip speed {:.2f} m/s)",
                       g.success ? "success" : "fail", g.distance, g.tip_speed);
  }
  return fmt::format("{}: rmse_y {:.3f} deg, rmse_ydot {:.3f} deg/s, rms_u {:.3f} N m, "
                     "final error {:.3f} deg, grab {}{}",
                     label, m.rmse_y, m.rmse_ydot, m.rms_u, m.final_y_error, grab,
                     log.aborted ? ", ABORTED" : "");
}

void write_log(const std::filesystem::path& dir, const std::string& stem, const EpisodeLog& log) {
  write_episode_csv(dir / ("episode_" + stem + ".csv"), log.rows);
  write_events_csv(dir / ("events_" + stem + ".csv"), log.events);
  if (!log.cable_frames.empty()) write_cable_csv(dir / ("cable_" + stem + ".csv"), log.cable_frames);
}

int outcome(const EpisodeLog& log) {
  if (log.aborted) return kExitSingularity;
  return log.metrics.success ? kExitOk : kExitGrab;
}

void write_summary(const RunConfig& c, const std::string& body) {
  std::ofstream out(c.out_dir / "summary.txt", std::ios::binary);
  out << report_header(c) << body;
}

int cmd_swing(RunConfig c) {
  std::filesystem::create_directories(c.out_dir);
  std::string body;
  int code = kExitOk;
  const auto run = [&](ControllerKind kind, bool decides) {
    Scenario s = c.scenario;
    s.controller = kind;
    const EpisodeLog log = run_swing(s);
    write_log(c.out_dir, to_string(kind), log);
    const std::string line = metrics_line(to_string(kind), log);
    fmt::print("{}\n", line);
    body += line + "\n";
    if (decides) code = outcome(log);
  };
  switch (c.controllers) {
    case ControllerChoice::kAdaptiveRobust:
      run(ControllerKind::kAdaptiveRobust, true);
      break;
    case ControllerChoice::kFeedbackLinearization:
      run(ControllerKind::kFeedbackLinearization, true);
      break;
    case ControllerChoice::kBoth:
      run(ControllerKind::kAdaptiveRobust, true);
      run(ControllerKind::kFeedbackLinearization, false);
      break;
  }
  write_summary(c, body);
  return code;
}

int cmd_monte_carlo(const RunConfig& c) {
  std::filesystem::create_directories(c.out_dir / "runs");
  const MonteCarloResult res = monte_carlo(c.scenario, c.ranges, c.monte_carlo_runs, c.seed,
                                           {thread_count(), true});
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const std::string tag = fmt::format("{:03}", res.runs[i].index);
    write_log(c.out_dir / "runs", tag + "_adaptive-robust", res.adaptive_logs[i]);
    write_log(c.out_dir / "runs", tag + "_feedback-linearization", res.baseline_logs[i]);
  }
  write_aggregate_csv(c.out_dir / "aggregate.csv", res.aggregate);
  write_runs_csv(c.out_dir / "runs.csv", res.runs);

  std::string table = fmt::format("{:<24} {:>10} {:>10} {:>12} {:>10}\n", "controller",
                                  "rms_u", "rmse_y", "rmse_ydot", "successes");
  for (const auto& row : res.aggregate) {
    table += fmt::format("{:<24} {:>10.3f} {:>10.3f} {:>12.3f} {:>7}/{}\n",
                         to_string(row.controller), row.rms_u, row.rmse_y, row.rmse_ydot,
                         row.successes, row.runs);
  }
  fmt::print("{}", table);
  write_summary(c, fmt::format("# monte carlo: n {}, seed {}\n", c.monte_carlo_runs, c.seed) +
                       table);
  return kExitOk;
}

int cmd_continuous(RunConfig c) {
  std::filesystem::create_directories(c.out_dir);
  if (c.controllers == ControllerChoice::kFeedbackLinearization) {
    c.scenario.controller = ControllerKind::kFeedbackLinearization;
  }
  const EpisodeLog log = run_continuous(c.scenario);
  write_episode_csv(c.out_dir / "episode.csv", log.rows);
  write_events_csv(c.out_dir / "events.csv", log.events);
  if (!log.cable_frames.empty()) write_cable_csv(c.out_dir / "cable.csv", log.cable_frames);
  write_swings_csv(c.out_dir / "swings.csv", log.swings);

  std::string table = fmt::format("{:>5} {:>9} {:>9} {:>10} {:>8} {:>10} {:>10} {:>8}\n",
                                  "swing", "pivot_x", "rmse_y", "rms_u", "grab", "distance",
                                  "tip_speed", "grab_x");
  for (const auto& s : log.swings) {
    table += fmt::format("{:>5} {:>9.3f} {:>9.3f} {:>10.3f} {:>8} {:>10.3f} {:>10.3f} {:>8.3f}\n",
                         s.index, s.pivot_x, s.metrics.rmse_y, s.metrics.rms_u,
                         s.grab.success ? "yes" : "no", s.grab.distance, s.grab.tip_speed,
                         s.grab.point.x());
  }
  table += fmt::format("progress {:.3f} m over {} of {} swings{}\n", log.progress(),
                       log.swings.size(), c.scenario.swings, log.aborted ? ", ABORTED" : "");
  fmt::print("{}", table);
  write_summary(c, table);

  if (log.aborted) return kExitSingularity;
  for (const auto& s : log.swings) {
    if (!s.grab.success) {
      fmt::print(stderr, "grab failed on swing {}\n", s.index);
      return kExitGrab;
    }
  }
  return kExitOk;
}

int cmd_validate() {
  const oracle::CheckResult checks[] = {
      oracle::check_dynamics_oracle(), oracle::check_affine_equivalence(),
      oracle::check_energy_conservation(), oracle::check_energy_dissipation()};
  bool ok = true;
  for (const auto& r : checks) {
    fmt::print("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
    ok = ok && r.passed;
  }
  Scenario exact;
  exact.guess = UncertainParams::from(exact.spring_damper);
  exact.initial.q = Vec3(deg(-48.0), deg(-98.0), 1.84);
  const EpisodeLog log = run_swing(exact);
  const bool tracked = !log.aborted && log.metrics.rmse_y < 0.5;
  fmt::print("{} exact-model closed loop: rmse_y {:.4f} deg\n", tracked ? "PASS" : "FAIL",
             log.metrics.rmse_y);
  return ok && tracked ? kExitOk : kExitValidation;
}

}  // namespace
}  // namespace brachiation::cli

int main(int argc, char** argv) {
  using namespace brachiation;
  using namespace brachiation::cli;

  CLI::App app{"Adaptive robust brachiation simulator"};
  app.require_subcommand(1);
  app.footer(describe_keys());
  Overrides o;
  CLI::App* swing = app.add_subcommand("swing", "Single swing for one or both controllers");
  CLI::App* mc = app.add_subcommand("monte-carlo", "Batch over drawn initial conditions");
  CLI::App* cont = app.add_subcommand("continuous", "Sequential swings with regrasping");
  CLI::App* validate = app.add_subcommand("validate", "Run the oracle and invariant suite");
  for (CLI::App* cmd : {swing, mc, cont}) {
    add_common(cmd, o);
    cmd->footer(describe_keys());
  }
  mc->add_option("-n", o.n, "Number of runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (validate->parsed()) return cmd_validate();
    const RunConfig config = build_config(o);
    if (swing->parsed()) return cmd_swing(config);
    if (mc->parsed()) return cmd_monte_carlo(config);
    return cmd_continuous(config);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  }
}
