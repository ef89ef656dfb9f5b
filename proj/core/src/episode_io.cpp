#include "brachiation/episode_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string_view>

#include "brachiation/errors.hpp"

namespace brachiation {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// Line-oriented CSV reader that checks the header and splits fields.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, std::string_view header) : in_(path) {
    if (!in_) throw ParseError("cannot open " + path.string(), 0);
    std::string line;
    if (!next_line(line) || line != header) {
      throw ParseError(fmt::format("expected header {}", header), line_);
    }
    columns_ = 1 + static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (next_line(line)) {
      if (line.empty()) continue;
      fields.clear();
      std::size_t start = 0;
      for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (fields.size() != columns_) {
        throw ParseError(fmt::format("expected {} fields, got {}", columns_, fields.size()),
                         line_);
      }
      return true;
    }
    return false;
  }

  double number(const std::string& field) const {
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw ParseError(fmt::format("invalid number '{}'", field), line_);
    }
    return v;
  }

  long integer(const std::string& field) const {
    long v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw ParseError(fmt::format("invalid integer '{}'", field), line_);
    }
    return v;
  }

  std::size_t line() const { return line_; }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::ifstream in_;
  std::size_t line_ = 0;
  std::size_t columns_ = 0;
};

ControllerKind parse_controller(const std::string& name, std::size_t line) {
  if (name == "adaptive-robust") return ControllerKind::kAdaptiveRobust;
  if (name == "feedback-linearization") return ControllerKind::kFeedbackLinearization;
  throw ParseError("unknown controller '" + name + "'", line);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.17g}", value);
}

void write_episode_csv(const std::filesystem::path& path, const std::vector<LogRow>& rows) {
  auto out = open_out(path);
  out << kEpisodeHeader << '\n';
  for (const auto& r : rows) {
    const double values[] = {r.t,        r.state.q[0],    r.state.q[1],    r.state.q[2],
                             r.state.qdot[0], r.state.qdot[1], r.state.qdot[2], r.y,
                             r.ydot,     r.y_d,           r.yd_dot,        r.u,
                             r.u_raw,    r.s,             r.s_delta,       r.k_d,
                             r.p_hat[0], r.p_hat[1],      r.p_hat[2],      r.F_c,
                             r.F_d,      r.V};
    std::string line;
    for (double v : values) {
      if (!line.empty()) line += ',';
      line += format_double(v);
    }
    out << line << '\n';
  }
}

void write_events_csv(const std::filesystem::path& path, const std::vector<Event>& events) {
  auto out = open_out(path);
  out << kEventsHeader << '\n';
  for (const auto& e : events) out << format_double(e.t) << ',' << e.name << '\n';
}

void write_cable_csv(const std::filesystem::path& path, const std::vector<CableFrame>& frames) {
  auto out = open_out(path);
  out << kCableHeader << '\n';
  for (const auto& f : frames) {
    for (std::size_t i = 0; i < f.pos.size(); ++i) {
      out << format_double(f.t) << ',' << i << ',' << format_double(f.pos[i].x()) << ','
          << format_double(f.pos[i].y()) << '\n';
    }
  }
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::array<AggregateRow, 2>& rows) {
  auto out = open_out(path);
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.controller) << ',' << format_double(r.rms_u) << ','
        << format_double(r.rmse_y) << ',' << format_double(r.rmse_ydot) << ',' << r.successes
        << ',' << r.runs << '\n';
  }
}

void write_runs_csv(const std::filesystem::path& path, const std::vector<MonteCarloRun>& runs) {
  auto out = open_out(path);
  out << kRunsHeader << '\n';
  for (const auto& r : runs) {
    const std::pair<ControllerKind, const Metrics*> both[] = {
        {ControllerKind::kAdaptiveRobust, &r.adaptive},
        {ControllerKind::kFeedbackLinearization, &r.baseline}};
    for (const auto& [kind, m] : both) {
      out << r.index << ',' << format_double(to_deg(r.initial.q[0])) << ','
          << format_double(to_deg(r.initial.q[1])) << ',' << to_string(kind) << ','
          << format_double(m->rms_u) << ',' << format_double(m->rmse_y) << ','
          << format_double(m->rmse_ydot) << ',' << format_double(m->final_y_error) << ','
          << (m->success ? 1 : 0) << '\n';
    }
  }
}

void write_swings_csv(const std::filesystem::path& path, const std::vector<SwingSummary>& swings) {
  auto out = open_out(path);
  out << kSwingsHeader << '\n';
  for (const auto& s : swings) {
    const Metrics& m = s.metrics;
    out << s.index << ',' << format_double(s.t_start) << ',' << format_double(s.t_end) << ','
        << format_double(s.pivot_x) << ',' << format_double(m.rmse_y) << ','
        << format_double(m.rmse_ydot) << ',' << format_double(m.rms_u) << ','
        << format_double(m.final_y_error) << ',' << (s.grab.success ? 1 : 0) << ','
        << format_double(s.grab.distance) << ',' << format_double(s.grab.tip_speed) << ','
        << format_double(s.grab.point.x()) << ',' << format_double(s.grab.point.y()) << '\n';
  }
}

std::vector<LogRow> read_episode_csv(const std::filesystem::path& path) {
  CsvReader csv(path, kEpisodeHeader);
  std::vector<LogRow> rows;
  std::vector<std::string> f;
  while (csv.next(f)) {
    double v[22];
    for (std::size_t i = 0; i < 22; ++i) v[i] = csv.number(f[i]);
    LogRow r;
    r.t = v[0];
    r.state.q = Vec3(v[1], v[2], v[3]);
    r.state.qdot = Vec3(v[4], v[5], v[6]);
    r.y = v[7];
    r.ydot = v[8];
    r.y_d = v[9];
    r.yd_dot = v[10];
    r.u = v[11];
    r.u_raw = v[12];
    r.s = v[13];
    r.s_delta = v[14];
    r.k_d = v[15];
    r.p_hat = Vec3(v[16], v[17], v[18]);
    r.F_c = v[19];
    r.F_d = v[20];
    r.V = v[21];
    if (!rows.empty() && !(r.t > rows.back().t)) {
      throw ParseError("time column must be strictly increasing", csv.line());
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<Event> read_events_csv(const std::filesystem::path& path) {
  CsvReader csv(path, kEventsHeader);
  std::vector<Event> events;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f[1].empty()) throw ParseError("empty event name", csv.line());
    events.push_back({csv.number(f[0]), f[1]});
  }
  return events;
}

std::vector<CableFrame> read_cable_csv(const std::filesystem::path& path) {
  CsvReader csv(path, kCableHeader);
  std::vector<CableFrame> frames;
  std::vector<std::string> f;
  while (csv.next(f)) {
    const double t = csv.number(f[0]);
    const long index = csv.integer(f[1]);
    if (index == 0) frames.push_back({t, {}});
    if (frames.empty() || frames.back().t != t ||
        index != static_cast<long>(frames.back().pos.size())) {
      throw ParseError("node rows out of order", csv.line());
    }
    frames.back().pos.emplace_back(csv.number(f[2]), csv.number(f[3]));
  }
  return frames;
}

std::array<AggregateRow, 2> read_aggregate_csv(const std::filesystem::path& path) {
  CsvReader csv(path, kAggregateHeader);
  std::array<AggregateRow, 2> rows;
  std::vector<std::string> f;
  std::size_t count = 0;
  while (csv.next(f)) {
    if (count == 2) throw ParseError("expected two controller rows", csv.line());
    AggregateRow& r = rows[count++];
    r.controller = parse_controller(f[0], csv.line());
    r.rms_u = csv.number(f[1]);
    r.rmse_y = csv.number(f[2]);
    r.rmse_ydot = csv.number(f[3]);
    r.successes = static_cast<int>(csv.integer(f[4]));
    r.runs = static_cast<int>(csv.integer(f[5]));
  }
  if (count != 2) throw ParseError("expected two controller rows", csv.line());
  return rows;
}

EpisodeLog read_episode(const std::filesystem::path& csv, const std::filesystem::path& events) {
  EpisodeLog log;
  log.rows = read_episode_csv(csv);
  log.events = read_events_csv(events);
  // A row is paused strictly between a pause_start and its pause_end; the
  // boundary instants belong to the swings.
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    if (log.events[i].name != "pause_start") continue;
    const double begin = log.events[i].t;
    double end = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < log.events.size(); ++j) {
      if (log.events[j].name == "pause_end") {
        end = log.events[j].t;
        break;
      }
    }
    for (auto& r : log.rows) {
      if (r.t > begin && r.t < end) r.paused = true;
    }
  }
  for (const auto& e : log.events) {
    if (e.name.find("abort") != std::string::npos) log.aborted = true;
  }
  return log;
}

}  // namespace brachiation
