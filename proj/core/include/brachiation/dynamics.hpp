#pragma once

#include <Eigen/Dense>
#include <optional>

namespace brachiation {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using RowVec3 = Eigen::RowVector3d;

/// Physical constants of the two-link robot. Defaults are the prototype values:
/// m0 = 2 kg main body at the elbow, 1 kg links of 0.71 m, link centres of mass
/// at 2l/3 (pivot link, from the pivot) and l/3 (swing link, from the elbow),
/// slender-rod inertias m l^2 / 12.
struct RobotParams {
  double m0 = 2.0;
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 0.71;
  double l2 = 0.71;
  double d1 = 2.0 * 0.71 / 3.0;
  double d2 = 0.71 / 3.0;
  double I1 = 1.0 * 0.71 * 0.71 / 12.0;
  double I2 = 1.0 * 0.71 * 0.71 / 12.0;
  double gravity = 9.81;

  double total_mass() const { return m0 + m1 + m2; }

  /// Throws ConfigError naming the first violated field.
  void validate() const;
};

/// Parallel spring-damper between the pivot gripper and a fixed anchor height.
struct SpringDamperParams {
  double k_s = 680.0;  // N/m
  double b_s = 20.0;   // N s/m
  double z_s = 1.9;    // m

  void validate() const;
};

/// The linearly parameterized unknowns p = [k_s, b_s, k_s z_s].
struct UncertainParams {
  Vec3 p = Vec3::Zero();

  static UncertainParams from(const SpringDamperParams& sd) {
    return UncertainParams{Vec3(sd.k_s, sd.b_s, sd.k_s * sd.z_s)};
  }
};

/// Generalized coordinates q = [theta1, theta2, z_g] and their rates.
/// theta1 is measured from the downward vertical (counterclockwise positive),
/// theta2 is the relative elbow angle. Angles are never wrapped.
struct RobotState {
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();

  bool finite() const { return q.allFinite() && qdot.allFinite(); }
};

struct ManipulatorMatrices {
  Mat3 M;      // inertia
  Vec3 Cqdot;  // C(q, qdot) qdot
  Vec3 D;      // gravity
};

/// Output acceleration written as ydd = g_term + h_row p + beta F_d + alpha u.
struct AffineTerms {
  double g_term = 0.0;
  RowVec3 h_row = RowVec3::Zero();
  double beta = 0.0;
  double alpha = 0.0;
};

/// Points of the kinematic chain in the vertical (x, z) plane.
struct LinkPoints {
  Vec2 pivot;
  Vec2 com1;
  Vec2 joint1;
  Vec2 com2;
  Vec2 tip;
};

/// |alpha| below this is treated as loss of control authority.
inline constexpr double kAlphaTolerance = 1e-9;

/// Closed-form Lagrangian model of the robot hanging from its pivot gripper.
/// The pivot moves only vertically; the elbow carries the main body mass m0.
/// Requires equal arm lengths so that y = theta1 + theta2 / 2 is the angle of
/// the pivot-to-tip line.
class RobotModel {
 public:
  explicit RobotModel(const RobotParams& params = {});

  const RobotParams& params() const { return params_; }

  LinkPoints kinematics(const Vec3& q, double pivot_x = 0.0) const;
  /// Cartesian velocities of the same points.
  LinkPoints point_velocities(const RobotState& state) const;

  ManipulatorMatrices manipulator_matrices(const RobotState& state) const;

  /// Solves M qdd = [0, u, F_c] - C qdot - D.
  Vec3 forward_dynamics(const RobotState& state, double u, double F_c) const;

  /// Output dynamics after eliminating the pivot coordinate.
  /// Throws SingularityError when |alpha| < kAlphaTolerance.
  AffineTerms affine_terms(const RobotState& state) const;

  /// Kinetic plus gravitational energy, zeroed at q = [0, 0, z_ref] at rest,
  /// plus the spring potential when `sd` is given.
  double total_energy(const RobotState& state,
                      const std::optional<SpringDamperParams>& sd = std::nullopt,
                      double z_ref = 0.0) const;

 private:
  RobotParams params_;
  // Lumped inertia constants of the closed-form matrices.
  double a_ = 0.0;   // m1 d1^2 + (m0 + m2) l1^2 + I1
  double b_ = 0.0;   // m2 d2^2 + I2
  double c_ = 0.0;   // m2 l1 d2
  double k1_ = 0.0;  // m1 d1 + (m0 + m2) l1
  double k2_ = 0.0;  // m2 d2
};

double output_angle(const Vec3& q);
double output_rate(const RobotState& state);

/// F_s = k_s (z_s - z_g) - b_s zdot_g, positive upward.
double spring_damper_force(double z_g, double zdot_g, const SpringDamperParams& sd);

/// F_c = F_s + F_d.
double cable_surrogate_force(double z_g, double zdot_g, const SpringDamperParams& sd,
                             double F_d);

}  // namespace brachiation
