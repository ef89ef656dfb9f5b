#include "brachiation/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brachiation/errors.hpp"
#include "brachiation/rk4.hpp"
#include "brachiation/simulation.hpp"
#include "lagrangian_oracle.hpp"
#include "test_support.hpp"

namespace brachiation {
namespace {

using testing::rel_error;

RobotState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> height(0.0, 3.0);
  std::uniform_real_distribution<double> rate(-3.0, 3.0);
  RobotState s;
  s.q = Vec3(angle(rng), angle(rng), height(rng));
  s.qdot = Vec3(rate(rng), rate(rng), rate(rng));
  return s;
}

TEST(RobotParams, DefaultsMatchPrototype) {
  const RobotParams p;
  EXPECT_EQ(p.m0, 2.0);
  EXPECT_EQ(p.m1, 1.0);
  EXPECT_EQ(p.m2, 1.0);
  EXPECT_EQ(p.l1, 0.71);
  EXPECT_EQ(p.l2, 0.71);
  EXPECT_DOUBLE_EQ(p.d1, 2.0 * 0.71 / 3.0);
  EXPECT_DOUBLE_EQ(p.d2, 0.71 / 3.0);
  EXPECT_DOUBLE_EQ(p.I1, 0.71 * 0.71 / 12.0);
  EXPECT_DOUBLE_EQ(p.I2, 0.71 * 0.71 / 12.0);
  EXPECT_EQ(p.gravity, 9.81);
  EXPECT_EQ(p.total_mass(), 4.0);
}

TEST(RobotParams, ValidationNamesField) {
  RobotParams p;
  p.m1 = 0.0;
  try {
    p.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "robot.m1");
  }
  p = RobotParams{};
  p.d2 = 0.8;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(RobotModel, UnequalArmsRejected) {
  RobotParams p;
  p.l2 = 0.8;
  p.d2 = 0.2;
  EXPECT_THROW(RobotModel{p}, ConfigError);
}

TEST(SpringDamper, UncertainVectorRoundTrip) {
  const SpringDamperParams sd{680.0, 20.0, 1.9};
  const UncertainParams u = UncertainParams::from(sd);
  EXPECT_EQ(u.p[0], 680.0);
  EXPECT_EQ(u.p[1], 20.0);
  EXPECT_EQ(u.p[2], 680.0 * 1.9);
}

TEST(Kinematics, StraightDown) {
  const RobotModel model;
  const LinkPoints pts = model.kinematics(Vec3(0.0, 0.0, 1.84));
  EXPECT_NEAR(pts.tip.x(), 0.0, 1e-15);
  EXPECT_NEAR(pts.tip.y(), 0.42, 1e-12);
}

TEST(Kinematics, HorizontalArm) {
  const RobotModel model;
  const LinkPoints pts = model.kinematics(Vec3(kPi / 2, 0.0, 1.84));
  EXPECT_NEAR(pts.joint1.x(), 0.71, 1e-12);
  EXPECT_NEAR(pts.joint1.y(), 1.84, 1e-12);
}

TEST(Kinematics, InitialSwingPose) {
  const RobotModel model;
  const LinkPoints pts = model.kinematics(Vec3(deg(-48.0), deg(-98.0), 1.84));
  EXPECT_NEAR(pts.joint1.x(), -0.5276328260889499, 1e-12);
  EXPECT_NEAR(pts.joint1.y(), 1.3649172694852107, 1e-12);
  EXPECT_NEAR(pts.tip.x(), -0.9246597875531801, 1e-12);
  EXPECT_NEAR(pts.tip.y(), 1.9535339459992902, 1e-12);
}

TEST(Kinematics, VelocitiesMatchFiniteDifference) {
  const RobotModel model;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const RobotState s = random_state(rng);
    const double h = 1e-6;
    const LinkPoints a = model.kinematics(s.q + h * s.qdot);
    const LinkPoints b = model.kinematics(s.q - h * s.qdot);
    const LinkPoints v = model.point_velocities(s);
    EXPECT_LT(rel_error(v.tip, Vec2((a.tip - b.tip) / (2 * h))), 1e-8);
    EXPECT_LT(rel_error(v.com1, Vec2((a.com1 - b.com1) / (2 * h))), 1e-8);
  }
}

TEST(ManipulatorMatrices, VerticalMassIsTotalMass) {
  const RobotModel model;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    EXPECT_DOUBLE_EQ(model.manipulator_matrices(random_state(rng)).M(2, 2), 4.0);
  }
}

TEST(ManipulatorMatrices, SymmetricPositiveDefinite) {
  const RobotModel model;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10000; ++i) {
    const Mat3 M = model.manipulator_matrices(random_state(rng)).M;
    ASSERT_EQ(M, M.transpose());
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(M);
    ASSERT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(ManipulatorMatrices, MatchOracleAtReferenceState) {
  const RobotModel model;
  RobotState s;
  s.q = Vec3(0.3, -0.7, 1.8);
  s.qdot = Vec3(0.5, -1.0, 0.2);
  const ManipulatorMatrices mm = model.manipulator_matrices(s);
  const RobotParams& p = model.params();
  EXPECT_LT((mm.M - oracle::inertia(p, s.q)).norm() / mm.M.norm(), 1e-6);
  EXPECT_LT(rel_error(mm.D, oracle::gravity(p, s.q)), 1e-6);
  EXPECT_LT(rel_error(mm.Cqdot, oracle::coriolis(p, s.q, s.qdot)), 1e-6);
}

TEST(ForwardDynamics, StaticHangIsEquilibrium) {
  const RobotModel model;
  RobotState s;
  s.q = Vec3(0.0, 0.0, 1.84);
  const Vec3 qdd = model.forward_dynamics(s, 0.0, 4.0 * 9.81);
  EXPECT_NEAR(qdd.norm(), 0.0, 1e-12);
}

TEST(ForwardDynamics, FreeFallAtAnyPose) {
  const RobotModel model;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    RobotState s = random_state(rng);
    s.qdot.setZero();
    const Vec3 qdd = model.forward_dynamics(s, 0.0, 0.0);
    EXPECT_NEAR(qdd[0], 0.0, 1e-12);
    EXPECT_NEAR(qdd[1], 0.0, 1e-12);
    EXPECT_NEAR(qdd[2], -9.81, 1e-12);
  }
}

TEST(ForwardDynamics, MatchesOracleOnRandomStates) {
  const RobotModel model;
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> f(0.0, 80.0);
  for (int i = 0; i < 100; ++i) {
    const RobotState s = random_state(rng);
    const double torque = u(rng);
    const double force = f(rng);
    const Vec3 expected = oracle::forward_dynamics(model.params(), s.q, s.qdot, torque, force);
    EXPECT_LT(rel_error(model.forward_dynamics(s, torque, force), expected), 1e-6);
  }
}

TEST(SpringDamperForce, HandValues) {
  const SpringDamperParams sd{680.0, 20.0, 1.9};
  EXPECT_DOUBLE_EQ(spring_damper_force(1.9, 0.0, sd), 0.0);
  EXPECT_NEAR(spring_damper_force(1.84, 0.0, sd), 40.8, 1e-10);
  EXPECT_DOUBLE_EQ(spring_damper_force(1.9, 0.5, sd), -10.0);
}

TEST(CableSurrogate, AddsResidual) {
  const SpringDamperParams sd{680.0, 20.0, 1.9};
  EXPECT_NEAR(cable_surrogate_force(1.84, 0.0, sd, 0.0), 40.8, 1e-10);
  const Disturbance d{10.0, 5.0};
  EXPECT_NEAR(cable_surrogate_force(1.9, 0.0, sd, d.at(0.05)), 10.0, 1e-12);
  const SpringDamperParams weak{500.0, 0.0, 1.9};
  EXPECT_NEAR(cable_surrogate_force(1.91, 0.0, weak, 5.0), 0.0, 1e-10);
}

TEST(Output, AngleAndRate) {
  EXPECT_NEAR(to_deg(output_angle(Vec3(deg(-48.0), deg(-98.0), 0.0))), -97.0, 1e-12);
  EXPECT_EQ(output_angle(Vec3::Zero()), 0.0);
  EXPECT_NEAR(to_deg(output_angle(Vec3(deg(46.0), deg(96.0), 0.0))), 94.0, 1e-12);
  RobotState s;
  EXPECT_EQ(output_rate(s), 0.0);
  s.qdot = Vec3(1.0, 2.0, 0.3);
  EXPECT_EQ(output_rate(s), 2.0);
  s.qdot = Vec3(1.0, -2.0, 0.3);
  EXPECT_EQ(output_rate(s), 0.0);
}

TEST(AffineTerms, ComposeToForwardDynamics) {
  const RobotModel model;
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> ks(100.0, 1000.0);
  std::uniform_real_distribution<double> bs(0.0, 40.0);
  std::uniform_real_distribution<double> zs(1.0, 2.5);
  std::uniform_real_distribution<double> fd(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const RobotState s = random_state(rng);
    const SpringDamperParams sd{ks(rng), bs(rng), zs(rng)};
    const double torque = u(rng);
    const double F_d = fd(rng);
    const AffineTerms t = model.affine_terms(s);
    const double composed =
        t.g_term + t.h_row.dot(UncertainParams::from(sd).p) + t.beta * F_d + t.alpha * torque;
    const Vec3 qdd =
        model.forward_dynamics(s, torque, cable_surrogate_force(s.q[2], s.qdot[2], sd, F_d));
    EXPECT_LT(rel_error(composed, qdd[0] + 0.5 * qdd[1]), 1e-8);
  }
}

TEST(AffineTerms, DriftAndLinearity) {
  const RobotModel model;
  RobotState s;
  s.q = Vec3(-0.4, -1.2, 1.8);
  s.qdot = Vec3(0.7, 1.1, -0.2);
  const AffineTerms t = model.affine_terms(s);
  const Vec3 qdd0 = model.forward_dynamics(s, 0.0, 0.0);
  EXPECT_NEAR(qdd0[0] + 0.5 * qdd0[1], t.g_term, 1e-12);
  const Vec3 qdd2 = model.forward_dynamics(s, 2.0, 0.0);
  EXPECT_NEAR((qdd2[0] + 0.5 * qdd2[1]) - (qdd0[0] + 0.5 * qdd0[1]), 2.0 * t.alpha, 1e-12);
  EXPECT_NEAR(t.h_row[0], -t.beta * s.q[2], 1e-15);
  EXPECT_NEAR(t.h_row[1], -t.beta * s.qdot[2], 1e-15);
  EXPECT_EQ(t.h_row[2], t.beta);
}

TEST(Energy, ZeroAtReference) {
  const RobotModel model;
  RobotState s;
  s.q = Vec3(0.0, 0.0, 1.5);
  EXPECT_EQ(model.total_energy(s, std::nullopt, 1.5), 0.0);
}

TEST(Energy, ClosedFormMatchesOracle) {
  const RobotModel model;
  std::mt19937_64 rng(16);
  for (int i = 0; i < 50; ++i) {
    const RobotState a = random_state(rng);
    const RobotState b = random_state(rng);
    const double closed = model.total_energy(a) - model.total_energy(b);
    const auto& p = model.params();
    const double direct = oracle::kinetic_energy(p, a.q, a.qdot) +
                          oracle::potential_energy(p, a.q) -
                          oracle::kinetic_energy(p, b.q, b.qdot) - oracle::potential_energy(p, b.q);
    EXPECT_LT(rel_error(closed, direct), 1e-12);
  }
}

using Vec7 = Eigen::Matrix<double, 7, 1>;

// Integrates the robot on the spring-damper plant with u = 0. The last state
// entry accumulates the damper dissipation b_s zdot^2.
Vec7 swing_on_spring(const RobotModel& model, const SpringDamperParams& sd, Vec7 x, double dt,
                     int steps) {
  const auto f = [&](double, const Vec7& s) {
    const RobotState r{s.segment<3>(0), s.segment<3>(3)};
    Vec7 d;
    d.segment<3>(0) = r.qdot;
    d.segment<3>(3) = model.forward_dynamics(r, 0.0, spring_damper_force(r.q[2], r.qdot[2], sd));
    d[6] = sd.b_s * r.qdot[2] * r.qdot[2];
    return d;
  };
  for (int i = 0; i < steps; ++i) x = rk4_step(x, i * dt, dt, f);
  return x;
}

TEST(Energy, UndampedSwingConserves) {
  const RobotModel model;
  const SpringDamperParams sd{680.0, 0.0, 1.9};
  Vec7 x;
  x << deg(-48.0), deg(-98.0), 1.84, 0.5, -1.0, 0.1, 0.0;
  const Vec7 y = swing_on_spring(model, sd, x, 1e-5, 100000);
  const double e0 = model.total_energy({x.segment<3>(0), x.segment<3>(3)}, sd);
  const double e1 = model.total_energy({y.segment<3>(0), y.segment<3>(3)}, sd);
  EXPECT_LT(std::abs(e1 - e0) / std::abs(e0), 1e-6);
}

TEST(Energy, DampedDecrementMatchesDissipation) {
  const RobotModel model;
  const SpringDamperParams sd{680.0, 20.0, 1.9};
  Vec7 x;
  x << deg(-48.0), deg(-98.0), 1.75, 0.5, -1.0, 0.4, 0.0;
  const double e0 = model.total_energy({x.segment<3>(0), x.segment<3>(3)}, sd);
  double previous = e0;
  Vec7 y = x;
  for (int block = 0; block < 100; ++block) {
    y = swing_on_spring(model, sd, y, 1e-5, 1000);
    const double e = model.total_energy({y.segment<3>(0), y.segment<3>(3)}, sd);
    EXPECT_LE(e, previous + 1e-9);
    previous = e;
  }
  const double decrement = e0 - previous;
  ASSERT_GT(y[6], 0.0);
  EXPECT_LT(std::abs(decrement - y[6]) / y[6], 1e-4);
}

}  // namespace
}  // namespace brachiation
