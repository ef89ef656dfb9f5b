#pragma once

#include "brachiation/dynamics.hpp"

namespace brachiation {

/// Tuning of the direct-indirect adaptive robust controller.
struct ControllerGains {
  double lambda = 8.0;                  // 1/s, error scaling in s = edot + lambda e
  Vec3 gamma = Vec3(100.0, 10.0, 100.0);  // diagonal of the indirect adaptation gain
  double phi = 0.4;                     // boundary-layer half width
  double k_d0 = 0.5;                    // initial robust gain; must stay below 1
  double torque_limit = 10.0;           // N m

  void validate() const;
};

/// PD gains of the feedback-linearization baseline.
struct BaselineGains {
  double kp = 20.0;
  double kd = 5.0;
  double torque_limit = 10.0;

  void validate() const;
};

struct OutputTarget {
  double y_d = 0.0;
  double yd_dot = 0.0;
  double yd_ddot = 0.0;
};

/// Adapted quantities carried through an episode.
struct ControllerState {
  Vec3 p_hat = Vec3::Zero();
  double k_d = 0.0;

  /// k_d starts at k_d0.
  static ControllerState initial(const UncertainParams& guess, const ControllerGains& gains) {
    return ControllerState{guess.p, gains.k_d0};
  }
};

struct ControlDiagnostics {
  double e = 0.0;
  double edot = 0.0;
  double s = 0.0;
  double s_delta = 0.0;
  double v = 0.0;
  double u_raw = 0.0;
  bool saturated = false;
};

struct ControlOutput {
  double u = 0.0;  // clipped torque
  ControlDiagnostics diag;
  AffineTerms terms;
};

struct AdaptationRates {
  Vec3 p_hat_rate = Vec3::Zero();
  double k_d_rate = 0.0;
};

double sliding_variable(double e, double edot, double lambda);

/// Identity on [-1, 1], sign outside.
double sat(double x);

/// Distance of s outside the layer |s| <= phi; zero inside.
double boundary_layer_trajectory(double s, double phi);

double robust_term(double s, double phi, double k_d);

/// pdot_hat = -Gamma h^T s_delta and kdot_d = k_d0 |s_delta|.
AdaptationRates adaptation_rates(double s_delta, const RowVec3& h_row,
                                 const ControllerGains& gains);

/// u = (ydd_d - g - h p_hat + v + lambda edot) / alpha, clipped to the torque
/// limit. Throws SingularityError when |alpha| < kAlphaTolerance.
ControlOutput adaptive_robust_control(const RobotModel& model, const RobotState& state,
                                      const OutputTarget& target, const ControllerState& cstate,
                                      const ControllerGains& gains);

/// Input-output linearization with PD error feedback and a fixed parameter
/// guess; no disturbance term and no adaptation.
ControlOutput feedback_linearization_control(const RobotModel& model, const RobotState& state,
                                             const OutputTarget& target,
                                             const UncertainParams& assumed,
                                             const BaselineGains& gains);

/// V = s_delta^2 / 2 + p_tilde^T Gamma^-1 p_tilde / 2 + k_tilde^2 / 2.
double lyapunov_value(double s_delta, const Vec3& p_tilde, double k_tilde, const Vec3& gamma);

/// The gain k_bar = |beta F_d| / k_d0 that dominates a disturbance of the given
/// size.
double ideal_robust_gain(double beta, double F_d, double k_d0);

}  // namespace brachiation
