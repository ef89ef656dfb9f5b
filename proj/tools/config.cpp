#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "brachiation/errors.hpp"

namespace brachiation::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string_view s) {
  std::string t = trim(s);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return t;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError(std::string(key), fmt::format("expected a number, got '{}'", t));
  }
  return v;
}

long long to_integer(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError(std::string(key), fmt::format("expected an integer, got '{}'", t));
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(std::string(key), fmt::format("expected true or false, got '{}'", t));
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(to_double(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

struct Entry {
  KeyInfo info;
  Setter set;
};

Setter number(double Scenario::*field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    c.scenario.*field = to_double(k, v);
  };
}

template <class Fn>
Setter scalar(Fn fn) {
  return [fn](RunConfig& c, std::string_view k, std::string_view v) { fn(c, to_double(k, v)); };
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"plant.kind", "-", "spring-damper or full-cable"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scenario.plant = parse_plant(v, k);
       }},
      {{"robot.m0", "kg", "body mass at the elbow"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.m0 = x; })},
      {{"robot.m1", "kg", "pivot-arm mass"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.m1 = x; })},
      {{"robot.m2", "kg", "swing-arm mass"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.m2 = x; })},
      {{"robot.l1", "m", "pivot-arm length"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.l1 = x; })},
      {{"robot.l2", "m", "swing-arm length"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.l2 = x; })},
      {{"robot.d1", "m", "pivot to pivot-arm centre of mass"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.d1 = x; })},
      {{"robot.d2", "m", "elbow to swing-arm centre of mass"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.d2 = x; })},
      {{"robot.I1", "kg m^2", "pivot-arm inertia about its centre of mass"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.I1 = x; })},
      {{"robot.I2", "kg m^2", "swing-arm inertia about its centre of mass"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.I2 = x; })},
      {{"robot.gravity", "m/s^2", "gravitational acceleration"},
       scalar([](RunConfig& c, double x) { c.scenario.robot.gravity = x; })},
      {{"spring_damper.k_s", "N/m", "surrogate stiffness (truth)"},
       scalar([](RunConfig& c, double x) { c.scenario.spring_damper.k_s = x; })},
      {{"spring_damper.b_s", "N s/m", "surrogate damping (truth)"},
       scalar([](RunConfig& c, double x) { c.scenario.spring_damper.b_s = x; })},
      {{"spring_damper.z_s", "m", "surrogate anchor height (truth)"},
       scalar([](RunConfig& c, double x) { c.scenario.spring_damper.z_s = x; })},
      {{"cable.length", "m", "unstretched cable length"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.length = x; })},
      {{"cable.linear_mass", "kg/m", "mass per unit length"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.linear_mass = x; })},
      {{"cable.stiffness", "N/m", "axial stiffness, see cable.stiffness_mode"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.stiffness = x; })},
      {{"cable.stiffness_mode", "-", "per-segment or total"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         const std::string t = trim(v);
         if (t == "per-segment") {
           c.scenario.cable.stiffness_mode = StiffnessMode::kPerSegment;
         } else if (t == "total") {
           c.scenario.cable.stiffness_mode = StiffnessMode::kTotal;
         } else {
           throw ConfigError(std::string(k), fmt::format("expected per-segment or total, got '{}'", t));
         }
       }},
      {{"cable.segment_damping", "N s/m", "axial damping of each segment"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.segment_damping = x; })},
      {{"cable.n_segments", "-", "number of lumped-mass segments"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scenario.cable.n_segments = static_cast<int>(to_integer(k, v));
       }},
      {{"cable.support_left_x", "m", "left support position"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.support_left.x() = x; })},
      {{"cable.support_left_z", "m", "left support height"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.support_left.y() = x; })},
      {{"cable.support_right_x", "m", "right support position"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.support_right.x() = x; })},
      {{"cable.support_right_z", "m", "right support height"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.support_right.y() = x; })},
      {{"cable.gravity", "m/s^2", "gravitational acceleration on the cable"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.gravity = x; })},
      {{"cable.substep", "s", "explicit cable step inside each robot step"},
       scalar([](RunConfig& c, double x) { c.scenario.cable.substep = x; })},
      {{"controller.kind", "-", "adaptive-robust, feedback-linearization or both"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.controllers = parse_controller_choice(v, k);
       }},
      {{"controller.lambda", "1/s", "sliding-surface slope"},
       scalar([](RunConfig& c, double x) { c.scenario.gains.lambda = x; })},
      {{"controller.gamma_ks", "-", "adaptation gain for k_s"},
       scalar([](RunConfig& c, double x) { c.scenario.gains.gamma[0] = x; })},
      {{"controller.gamma_bs", "-", "adaptation gain for b_s"},
       scalar([](RunConfig& c, double x) { c.scenario.gains.gamma[1] = x; })},
      {{"controller.gamma_kszs", "-", "adaptation gain for k_s z_s"},
       scalar([](RunConfig& c, double x) { c.scenario.gains.gamma[2] = x; })},
      {{"controller.phi", "rad/s", "boundary-layer half width"},
       scalar([](RunConfig& c, double x) { c.scenario.gains.phi = x; })},
      {{"controller.k_d0", "-", "initial robust gain, below 1"},
       scalar([](RunConfig& c, double x) { c.scenario.gains.k_d0 = x; })},
      {{"controller.torque_limit", "N m", "elbow torque clip for both controllers"},
       scalar([](RunConfig& c, double x) {
         c.scenario.gains.torque_limit = x;
         c.scenario.baseline.torque_limit = x;
       })},
      {{"baseline.kp", "1/s^2", "feedback-linearization position gain"},
       scalar([](RunConfig& c, double x) { c.scenario.baseline.kp = x; })},
      {{"baseline.kd", "1/s", "feedback-linearization rate gain"},
       scalar([](RunConfig& c, double x) { c.scenario.baseline.kd = x; })},
      {{"guess.k_s", "N/m", "initial stiffness estimate"},
       scalar([](RunConfig& c, double x) {
         const double z_s = c.scenario.guess.p[2] / c.scenario.guess.p[0];
         c.scenario.guess.p[0] = x;
         c.scenario.guess.p[2] = x * z_s;
       })},
      {{"guess.b_s", "N s/m", "initial damping estimate"},
       scalar([](RunConfig& c, double x) { c.scenario.guess.p[1] = x; })},
      {{"guess.z_s", "m", "initial anchor height estimate"},
       scalar([](RunConfig& c, double x) { c.scenario.guess.p[2] = c.scenario.guess.p[0] * x; })},
      {{"disturbance.amplitude", "N", "sinusoidal force on the surrogate plant"},
       scalar([](RunConfig& c, double x) { c.scenario.disturbance.amplitude = x; })},
      {{"disturbance.frequency", "Hz", "disturbance frequency"},
       scalar([](RunConfig& c, double x) { c.scenario.disturbance.frequency_hz = x; })},
      {{"reference.y0", "deg", "quintic reference start"},
       scalar([](RunConfig& c, double x) { c.reference_y0 = deg(x); })},
      {{"reference.yf", "deg", "quintic reference end"},
       scalar([](RunConfig& c, double x) { c.reference_yf = deg(x); })},
      {{"reference.file", "path", "reference CSV (t,y_d,yd_dot,yd_ddot) replacing the quintic"},
       [](RunConfig& c, std::string_view, std::string_view v) { c.reference_file = unquote(v); }},
      {{"episode.horizon", "s", "swing duration"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scenario.horizon = to_double(k, v);
         c.horizon_set = true;
       }},
      {{"episode.swings", "-", "number of swings for continuous runs"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scenario.swings = static_cast<int>(to_integer(k, v));
       }},
      {{"episode.pause", "s", "braked pause between swings"}, number(&Scenario::pause)},
      {{"episode.dt", "s", "integration step"}, number(&Scenario::dt)},
      {{"episode.control_period", "s", "zero-order hold of the torque"},
       number(&Scenario::control_period)},
      {{"episode.station_x", "m", "pivot position along the cable at release"},
       number(&Scenario::station_x)},
      {{"episode.ic", "deg,deg,m[,deg/s,deg/s,m/s]", "initial theta1, theta2, z_g and rates"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scenario.initial = parse_initial_condition(unquote(v), k);
       }},
      {{"grab.capture_radius", "m", "tip distance to the cable for a grab"},
       scalar([](RunConfig& c, double x) { c.scenario.grab.capture_radius = x; })},
      {{"grab.max_tip_speed", "m/s", "tip speed limit for a grab"},
       scalar([](RunConfig& c, double x) { c.scenario.grab.max_tip_speed = x; })},
      {{"monte_carlo.n", "-", "number of drawn initial conditions"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.monte_carlo_runs = static_cast<int>(to_integer(k, v));
       }},
      {{"monte_carlo.seed", "-", "random seed"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         const long long s = to_integer(k, v);
         if (s < 0) throw ConfigError(std::string(k), "must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {{"monte_carlo.theta1_min", "deg", "lower bound of theta1"},
       scalar([](RunConfig& c, double x) { c.ranges.theta1_min = deg(x); })},
      {{"monte_carlo.theta1_max", "deg", "upper bound of theta1"},
       scalar([](RunConfig& c, double x) { c.ranges.theta1_max = deg(x); })},
      {{"monte_carlo.theta2_min", "deg", "lower bound of theta2"},
       scalar([](RunConfig& c, double x) { c.ranges.theta2_min = deg(x); })},
      {{"monte_carlo.theta2_max", "deg", "upper bound of theta2"},
       scalar([](RunConfig& c, double x) { c.ranges.theta2_max = deg(x); })},
      {{"output.dir", "path", "output directory"},
       [](RunConfig& c, std::string_view, std::string_view v) { c.out_dir = unquote(v); }},
      {{"output.log_rate", "Hz", "episode CSV sample rate"}, number(&Scenario::log_rate)},
      {{"output.record_cable", "-", "write cable node positions (true or false)"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.scenario.record_cable = to_bool(k, v);
       }},
  };
  return table;
}

// Removes '#' and ';' comments that are outside double quotes.
std::string strip_comments(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    bool quoted = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (!quoted && (line[i] == '#' || line[i] == ';')) {
        cut = i;
        break;
      }
    }
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

}  // namespace

void RunConfig::finalize() {
  if (reference_file) {
    try {
      scenario.reference = load_trajectory(*reference_file);
    } catch (const Error& e) {
      throw ConfigError("reference.file", e.what());
    }
    if (!horizon_set) scenario.horizon = scenario.reference.horizon();
  } else {
    if (!(scenario.horizon > 0.0)) throw ConfigError("episode.horizon", "must be > 0 s");
    scenario.reference = OutputTrajectory::quintic(reference_y0, reference_yf, scenario.horizon);
  }
  if (!(scenario.guess.p[0] > 0.0)) throw ConfigError("guess.k_s", "must be > 0 N/m");
  if (!(scenario.guess.p[1] >= 0.0)) throw ConfigError("guess.b_s", "must be >= 0 N s/m");
  if (monte_carlo_runs < 1) throw ConfigError("monte_carlo.n", "must be >= 1");
  scenario.seed = seed;
  scenario.validate();
  ranges.validate();
}

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return keys;
}

std::string describe_keys() {
  std::string out = "Config keys ([section] key = value):\n";
  for (const auto& k : config_keys()) {
    out += fmt::format("  {:<26} [{}] {}\n", k.key, k.unit, k.description);
  }
  return out;
}

void apply(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& e : entries()) {
    if (e.info.key == key) {
      e.set(config, key, value);
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown key");
}

void apply_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", fmt::format("cannot open '{}'", path.string()));
  std::stringstream raw;
  raw << in.rdbuf();
  std::istringstream clean(strip_comments(raw.str()));
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(clean, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("--config", fmt::format("{}: line {}: {}", path.string(), e.line(),
                                              e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ConfigError(section, "keys must sit inside a [section]");
    }
    for (const auto& [name, leaf] : body) {
      apply(config, section + "." + name, unquote(leaf.data()));
    }
  }
}

RobotState parse_initial_condition(std::string_view text, std::string_view key) {
  const std::vector<double> v = to_list(key, text);
  if (v.size() != 3 && v.size() != 6) {
    throw ConfigError(std::string(key), "expected 3 or 6 comma-separated values");
  }
  RobotState s;
  s.q = Vec3(deg(v[0]), deg(v[1]), v[2]);
  if (v.size() == 6) s.qdot = Vec3(deg(v[3]), deg(v[4]), v[5]);
  return s;
}

ControllerChoice parse_controller_choice(std::string_view text, std::string_view key) {
  const std::string t = trim(text);
  if (t == "adaptive-robust") return ControllerChoice::kAdaptiveRobust;
  if (t == "feedback-linearization") return ControllerChoice::kFeedbackLinearization;
  if (t == "both") return ControllerChoice::kBoth;
  throw ConfigError(std::string(key),
                    fmt::format("expected adaptive-robust, feedback-linearization or both, got '{}'", t));
}

PlantKind parse_plant(std::string_view text, std::string_view key) {
  const std::string t = trim(text);
  if (t == "spring-damper") return PlantKind::kSpringDamper;
  if (t == "full-cable") return PlantKind::kFullCable;
  throw ConfigError(std::string(key),
                    fmt::format("expected spring-damper or full-cable, got '{}'", t));
}

}  // namespace brachiation::cli
