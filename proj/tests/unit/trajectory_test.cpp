#include "brachiation/trajectory.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "brachiation/errors.hpp"
#include "brachiation/simulation.hpp"
#include "test_support.hpp"

namespace brachiation {
namespace {

const OutputTrajectory& reference() {
  static const OutputTrajectory traj = quintic_profile(deg(-97.0), deg(94.0), 1.1);
  return traj;
}

TEST(Quintic, BoundaryConditions) {
  const auto& traj = reference();
  EXPECT_EQ(traj.origin(), TrajectoryOrigin::kGenerated);
  EXPECT_EQ(traj.horizon(), 1.1);
  const OutputTarget a = traj.sample(0.0);
  const OutputTarget b = traj.sample(1.1);
  EXPECT_EQ(a.y_d, deg(-97.0));
  EXPECT_EQ(a.yd_dot, 0.0);
  EXPECT_EQ(a.yd_ddot, 0.0);
  EXPECT_NEAR(b.y_d, deg(94.0), 1e-15);
  EXPECT_NEAR(b.yd_dot, 0.0, 1e-15);
  EXPECT_NEAR(b.yd_ddot, 0.0, 1e-12);
}

TEST(Quintic, MidpointIsMean) {
  EXPECT_NEAR(to_deg(reference().sample(0.55).y_d), -1.5, 1e-12);
  const OutputTrajectory other = quintic_profile(0.3, 1.7, 2.0);
  EXPECT_NEAR(other.sample(1.0).y_d, 1.0, 1e-15);
}

TEST(Quintic, MonotoneWithoutOvershoot) {
  const auto& traj = reference();
  double prev = traj.sample(0.0).y_d;
  for (int i = 1; i <= 1100; ++i) {
    const double y = traj.sample(i * 1e-3).y_d;
    EXPECT_GE(y, prev - 1e-15);
    EXPECT_LE(y, deg(94.0) + 1e-15);
    prev = y;
  }
}

TEST(Quintic, DerivativesConsistent) {
  // Five-point central differences on the 1 kHz grid. The three-point stencil
  // alone has a truncation error near 2.5e-5 rad/s for this swing.
  const auto& traj = reference();
  const double h = 1e-3;
  for (int i = 2; i <= 1098; ++i) {
    const double t = i * h;
    OutputTarget s[5];
    for (int k = 0; k < 5; ++k) s[k] = traj.sample(t + (k - 2) * h);
    const double dy = (s[0].y_d - 8 * s[1].y_d + 8 * s[3].y_d - s[4].y_d) / (12 * h);
    const double ddy = (s[0].yd_dot - 8 * s[1].yd_dot + 8 * s[3].yd_dot - s[4].yd_dot) / (12 * h);
    EXPECT_NEAR(dy, s[2].yd_dot, 1e-6) << "t = " << t;
    EXPECT_NEAR(ddy, s[2].yd_ddot, 1e-4) << "t = " << t;
  }
}

TEST(Quintic, HoldsPastHorizon) {
  const OutputTarget hold = reference().sample(1.6);
  EXPECT_NEAR(hold.y_d, deg(94.0), 1e-15);
  EXPECT_EQ(hold.yd_dot, 0.0);
  EXPECT_EQ(hold.yd_ddot, 0.0);
}

TEST(Quintic, RejectsNonPositiveHorizon) {
  EXPECT_THROW(quintic_profile(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(LoadTrajectory, RoundTripsQuinticAtSampleTimes) {
  testing::TempDir dir("traj");
  const auto path = dir / "ref.csv";
  save_trajectory(path, reference(), 1000.0);
  const OutputTrajectory loaded = load_trajectory(path);
  EXPECT_EQ(loaded.origin(), TrajectoryOrigin::kLoaded);
  EXPECT_NEAR(loaded.horizon(), 1.1, 1e-12);
  for (int i = 0; i <= 1100; ++i) {
    const double t = i * 1e-3;
    const OutputTarget a = loaded.sample(t);
    const OutputTarget b = reference().sample(std::min(t, 1.1));
    EXPECT_NEAR(a.y_d, b.y_d, 1e-8);
    EXPECT_NEAR(a.yd_dot, b.yd_dot, 1e-8);
  }
  // Between samples the cubic stays close to the quintic.
  EXPECT_NEAR(loaded.sample(0.5505).y_d, reference().sample(0.5505).y_d, 1e-9);
}

TEST(LoadTrajectory, TwoRowsGiveCubicHermite) {
  testing::TempDir dir("traj");
  const auto path = dir / "two.csv";
  {
    std::ofstream out(path);
    out << "t,y_d,yd_dot,yd_ddot\n0,0,1,0\n2,1,0,0\n";
  }
  const OutputTrajectory traj = load_trajectory(path);
  // Hermite through (0, 0, 1) and (2, 1, 0): y(1) = 0.5 * 0 + 0.125 * 2 * 1 + 0.5 * 1.
  EXPECT_NEAR(traj.sample(1.0).y_d, 0.75, 1e-15);
  EXPECT_NEAR(traj.sample(0.0).y_d, 0.0, 1e-15);
  EXPECT_NEAR(traj.sample(2.0).y_d, 1.0, 1e-15);
}

TEST(LoadTrajectory, NonMonotoneTimeRejectedWithLine) {
  testing::TempDir dir("traj");
  const auto path = dir / "bad.csv";
  {
    std::ofstream out(path);
    out << "t,y_d,yd_dot,yd_ddot\n0,0,0,0\n0.5,0.1,0,0\n0.4,0.2,0,0\n";
  }
  try {
    load_trajectory(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(LoadTrajectory, MalformedNumberRejectedWithLine) {
  testing::TempDir dir("traj");
  const auto path = dir / "bad.csv";
  {
    std::ofstream out(path);
    out << "t,y_d,yd_dot,yd_ddot\n0,0,0,0\n0.5,abc,0,0\n";
  }
  try {
    load_trajectory(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadTrajectory, WrongHeaderRejected) {
  testing::TempDir dir("traj");
  const auto path = dir / "bad.csv";
  {
    std::ofstream out(path);
    out << "time,y\n0,0\n";
  }
  EXPECT_THROW(load_trajectory(path), ParseError);
  EXPECT_THROW(load_trajectory(dir / "missing.csv"), ParseError);
}

}  // namespace
}  // namespace brachiation
