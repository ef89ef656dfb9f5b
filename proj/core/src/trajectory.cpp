#include "brachiation/trajectory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "brachiation/errors.hpp"

namespace brachiation {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Cubic Hermite basis on [0, 1] with interval length h.
double hermite(double p0, double m0, double p1, double m1, double h, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * h * m0 + (-2 * u3 + 3 * u2) * p1 +
         (u3 - u2) * h * m1;
}

}  // namespace

OutputTrajectory OutputTrajectory::quintic(double y0, double yf, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("trajectory horizon must be > 0");
  return OutputTrajectory(T, Quintic{y0, yf});
}

OutputTrajectory OutputTrajectory::from_samples(std::vector<TrajectorySample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("trajectory needs at least two rows");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw std::invalid_argument("trajectory time must be strictly increasing");
    }
  }
  const double horizon = samples.back().t;
  return OutputTrajectory(horizon, Sampled{std::move(samples)});
}

TrajectoryOrigin OutputTrajectory::origin() const {
  return std::holds_alternative<Quintic>(shape_) ? TrajectoryOrigin::kGenerated
                                                 : TrajectoryOrigin::kLoaded;
}

OutputTarget OutputTrajectory::sample(double t) const {
  if (t > horizon_) {
    OutputTarget hold = sample_inside(horizon_);
    hold.yd_dot = 0.0;
    hold.yd_ddot = 0.0;
    return hold;
  }
  return sample_inside(std::max(t, 0.0));
}

OutputTarget OutputTrajectory::sample_inside(double t) const {
  return std::visit(
      Overloaded{
          [&](const Quintic& q) {
            const double T = horizon_;
            const double s = t / T;
            const double s2 = s * s;
            const double s3 = s2 * s;
            const double span = q.yf - q.y0;
            OutputTarget out;
            out.y_d = q.y0 + span * s3 * (10.0 - 15.0 * s + 6.0 * s2);
            out.yd_dot = span * 30.0 * s2 * (1.0 - 2.0 * s + s2) / T;
            out.yd_ddot = span * 60.0 * s * (1.0 - 3.0 * s + 2.0 * s2) / (T * T);
            return out;
          },
          [&](const Sampled& sampled) {
            const auto& rows = sampled.rows;
            if (t <= rows.front().t) {
              return OutputTarget{rows.front().y, rows.front().ydot, rows.front().yddot};
            }
            auto hi = std::upper_bound(rows.begin(), rows.end(), t,
                                       [](double v, const TrajectorySample& r) { return v < r.t; });
            if (hi == rows.end()) {
              return OutputTarget{rows.back().y, rows.back().ydot, rows.back().yddot};
            }
            const auto& b = *hi;
            const auto& a = *(hi - 1);
            const double h = b.t - a.t;
            const double u = (t - a.t) / h;
            OutputTarget out;
            out.y_d = hermite(a.y, a.ydot, b.y, b.ydot, h, u);
            out.yd_dot = hermite(a.ydot, a.yddot, b.ydot, b.yddot, h, u);
            out.yd_ddot = a.yddot + u * (b.yddot - a.yddot);
            return out;
          },
      },
      shape_);
}

OutputTrajectory quintic_profile(double y0, double yf, double T) {
  return OutputTrajectory::quintic(y0, yf, T);
}

OutputTrajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file " + path.string(), 0);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,y_d,yd_dot,yd_ddot") {
    throw ParseError("expected header t,y_d,yd_dot,yd_ddot", line_no);
  }
  std::vector<TrajectorySample> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double values[4];
    std::string_view rest(line);
    for (int col = 0; col < 4; ++col) {
      const auto comma = rest.find(',');
      const std::string_view field = rest.substr(0, comma);
      if ((comma == std::string_view::npos) != (col == 3)) {
        throw ParseError("expected 4 comma-separated fields", line_no);
      }
      const auto res = std::from_chars(field.data(), field.data() + field.size(), values[col]);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size() ||
          !std::isfinite(values[col])) {
        throw ParseError(fmt::format("invalid number '{}'", field), line_no);
      }
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && !(values[0] > rows.back().t)) {
      throw ParseError("time column must be strictly increasing", line_no);
    }
    rows.push_back({values[0], values[1], values[2], values[3]});
  }
  if (rows.size() < 2) throw ParseError("trajectory needs at least two rows", line_no);
  return OutputTrajectory::from_samples(std::move(rows));
}

void save_trajectory(const std::filesystem::path& path, const OutputTrajectory& traj,
                     double rate_hz) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,y_d,yd_dot,yd_ddot\n";
  const auto count = static_cast<long>(std::llround(traj.horizon() * rate_hz));
  for (long i = 0; i <= count; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    const OutputTarget r = traj.sample(std::min(t, traj.horizon()));
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", t, r.y_d, r.yd_dot, r.yd_ddot);
  }
}

}  // namespace brachiation
