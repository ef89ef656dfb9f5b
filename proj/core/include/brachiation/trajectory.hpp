#pragma once

#include <filesystem>
#include <variant>
#include <vector>

#include "brachiation/control.hpp"

namespace brachiation {

/// One row of a reference file: t, y_d, yd_dot, yd_ddot (SI, radians).
struct TrajectorySample {
  double t = 0.0;
  double y = 0.0;
  double ydot = 0.0;
  double yddot = 0.0;
};

enum class TrajectoryOrigin { kGenerated, kLoaded };

/// Desired output over [0, horizon]. Sampling past the horizon holds the final
/// angle with zero rate and acceleration. Immutable once built.
class OutputTrajectory {
 public:
  /// Rest-to-rest quintic from y0 to yf over T seconds.
  static OutputTrajectory quintic(double y0, double yf, double T);

  /// Piecewise-cubic interpolant through the samples (strictly increasing t,
  /// at least two rows). Throws std::invalid_argument otherwise.
  static OutputTrajectory from_samples(std::vector<TrajectorySample> samples);

  double horizon() const { return horizon_; }
  TrajectoryOrigin origin() const;
  OutputTarget sample(double t) const;

 private:
  struct Quintic {
    double y0;
    double yf;
  };
  struct Sampled {
    std::vector<TrajectorySample> rows;
  };

  OutputTrajectory(double horizon, std::variant<Quintic, Sampled> shape)
      : horizon_(horizon), shape_(std::move(shape)) {}

  OutputTarget sample_inside(double t) const;

  double horizon_;
  std::variant<Quintic, Sampled> shape_;
};

OutputTrajectory quintic_profile(double y0, double yf, double T);

/// Reads the `t,y_d,yd_dot,yd_ddot` CSV schema. Throws ParseError with the
/// offending line number, including for non-increasing t.
OutputTrajectory load_trajectory(const std::filesystem::path& path);

/// Writes `traj` sampled at `rate_hz` over [0, horizon] in the same schema.
void save_trajectory(const std::filesystem::path& path, const OutputTrajectory& traj,
                     double rate_hz);

inline OutputTarget sample(const OutputTrajectory& traj, double t) { return traj.sample(t); }

}  // namespace brachiation
