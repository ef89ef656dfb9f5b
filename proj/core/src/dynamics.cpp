#include "brachiation/dynamics.hpp"

#include <cmath>
#include <string>

#include "brachiation/errors.hpp"

namespace brachiation {

namespace {

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void RobotParams::validate() const {
  require(m0 > 0.0, "robot.m0", "must be > 0 kg");
  require(m1 > 0.0, "robot.m1", "must be > 0 kg");
  require(m2 > 0.0, "robot.m2", "must be > 0 kg");
  require(l1 > 0.0, "robot.l1", "must be > 0 m");
  require(l2 > 0.0, "robot.l2", "must be > 0 m");
  require(d1 > 0.0 && d1 <= l1, "robot.d1", "must lie in (0, l1]");
  require(d2 > 0.0 && d2 <= l2, "robot.d2", "must lie in (0, l2]");
  require(I1 >= 0.0, "robot.I1", "must be >= 0 kg m^2");
  require(I2 >= 0.0, "robot.I2", "must be >= 0 kg m^2");
  require(gravity > 0.0, "robot.gravity", "must be > 0 m/s^2");
}

void SpringDamperParams::validate() const {
  require(k_s > 0.0, "spring_damper.k_s", "must be > 0 N/m");
  require(b_s >= 0.0, "spring_damper.b_s", "must be >= 0 N s/m");
  require(std::isfinite(z_s), "spring_damper.z_s", "must be finite");
}

RobotModel::RobotModel(const RobotParams& params) : params_(params) {
  params_.validate();
  if (params_.l1 != params_.l2) {
    throw ConfigError("robot.l2", "output map y = q1 + q2/2 requires l1 == l2");
  }
  const auto& p = params_;
  a_ = p.m1 * p.d1 * p.d1 + (p.m0 + p.m2) * p.l1 * p.l1 + p.I1;
  b_ = p.m2 * p.d2 * p.d2 + p.I2;
  c_ = p.m2 * p.l1 * p.d2;
  k1_ = p.m1 * p.d1 + (p.m0 + p.m2) * p.l1;
  k2_ = p.m2 * p.d2;
}

LinkPoints RobotModel::kinematics(const Vec3& q, double pivot_x) const {
  const auto& p = params_;
  const Vec2 down1(std::sin(q[0]), -std::cos(q[0]));
  const Vec2 down12(std::sin(q[0] + q[1]), -std::cos(q[0] + q[1]));
  LinkPoints pts;
  pts.pivot = Vec2(pivot_x, q[2]);
  pts.com1 = pts.pivot + p.d1 * down1;
  pts.joint1 = pts.pivot + p.l1 * down1;
  pts.com2 = pts.joint1 + p.d2 * down12;
  pts.tip = pts.joint1 + p.l2 * down12;
  return pts;
}

LinkPoints RobotModel::point_velocities(const RobotState& state) const {
  const auto& p = params_;
  const auto& q = state.q;
  const auto& qd = state.qdot;
  const double w = qd[0] + qd[1];
  // d/dt of (sin a, -cos a) is (cos a, sin a) * adot.
  const Vec2 turn1(std::cos(q[0]), std::sin(q[0]));
  const Vec2 turn12(std::cos(q[0] + q[1]), std::sin(q[0] + q[1]));
  LinkPoints v;
  v.pivot = Vec2(0.0, qd[2]);
  v.com1 = v.pivot + p.d1 * qd[0] * turn1;
  v.joint1 = v.pivot + p.l1 * qd[0] * turn1;
  v.com2 = v.joint1 + p.d2 * w * turn12;
  v.tip = v.joint1 + p.l2 * w * turn12;
  return v;
}

ManipulatorMatrices RobotModel::manipulator_matrices(const RobotState& state) const {
  const auto& q = state.q;
  const auto& qd = state.qdot;
  const double s1 = std::sin(q[0]);
  const double c1 = std::cos(q[0]);
  const double s2 = std::sin(q[1]);
  const double c2 = std::cos(q[1]);
  const double s12 = std::sin(q[0] + q[1]);
  const double c12 = std::cos(q[0] + q[1]);
  const double g = params_.gravity;
  const double mt = params_.total_mass();
  const double w = qd[0] + qd[1];

  ManipulatorMatrices mm;
  const double m11 = a_ + b_ + 2.0 * c_ * c2;
  const double m12 = b_ + c_ * c2;
  const double m13 = k1_ * s1 + k2_ * s12;
  const double m23 = k2_ * s12;
  mm.M << m11, m12, m13,
          m12, b_,  m23,
          m13, m23, mt;

  mm.Cqdot << -c_ * s2 * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]),
              c_ * s2 * qd[0] * qd[0],
              k1_ * c1 * qd[0] * qd[0] + k2_ * c12 * w * w;

  mm.D << g * (k1_ * s1 + k2_ * s12),
          g * k2_ * s12,
          g * mt;
  return mm;
}

Vec3 RobotModel::forward_dynamics(const RobotState& state, double u, double F_c) const {
  const ManipulatorMatrices mm = manipulator_matrices(state);
  Mat3 inv;
  bool invertible = false;
  mm.M.computeInverseWithCheck(inv, invertible);
  if (!invertible) throw SingularityError("inertia matrix is singular");
  const Vec3 rhs = Vec3(0.0, u, F_c) - mm.Cqdot - mm.D;
  return inv * rhs;
}

AffineTerms RobotModel::affine_terms(const RobotState& state) const {
  const ManipulatorMatrices mm = manipulator_matrices(state);
  Mat3 inv;
  bool invertible = false;
  mm.M.computeInverseWithCheck(inv, invertible);
  if (!invertible) throw SingularityError("inertia matrix is singular");

  // ydd = w^T qdd with w = [1, 1/2, 0].
  const RowVec3 w_minv = RowVec3(1.0, 0.5, 0.0) * inv;
  AffineTerms t;
  t.g_term = w_minv.dot(-mm.Cqdot - mm.D);
  t.alpha = w_minv[1];
  t.beta = w_minv[2];
  t.h_row = t.beta * RowVec3(-state.q[2], -state.qdot[2], 1.0);
  if (!(std::abs(t.alpha) >= kAlphaTolerance)) {
    throw SingularityError("input coefficient alpha vanished (|alpha| < 1e-9)");
  }
  return t;
}

double RobotModel::total_energy(const RobotState& state,
                                const std::optional<SpringDamperParams>& sd,
                                double z_ref) const {
  const ManipulatorMatrices mm = manipulator_matrices(state);
  const auto& q = state.q;
  const double kinetic = 0.5 * state.qdot.dot(mm.M * state.qdot);
  const double potential =
      params_.gravity * (params_.total_mass() * (q[2] - z_ref) -
                         k1_ * (std::cos(q[0]) - 1.0) - k2_ * (std::cos(q[0] + q[1]) - 1.0));
  double spring = 0.0;
  if (sd) {
    const double stretch = sd->z_s - q[2];
    spring = 0.5 * sd->k_s * stretch * stretch;
  }
  return kinetic + potential + spring;
}

double output_angle(const Vec3& q) { return q[0] + 0.5 * q[1]; }

double output_rate(const RobotState& state) { return state.qdot[0] + 0.5 * state.qdot[1]; }

double spring_damper_force(double z_g, double zdot_g, const SpringDamperParams& sd) {
  return sd.k_s * (sd.z_s - z_g) + sd.b_s * (-zdot_g);
}

double cable_surrogate_force(double z_g, double zdot_g, const SpringDamperParams& sd,
                             double F_d) {
  return spring_damper_force(z_g, zdot_g, sd) + F_d;
}

}  // namespace brachiation
