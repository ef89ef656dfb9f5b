#include "brachiation/control.hpp"

#include <algorithm>
#include <cmath>

#include "brachiation/errors.hpp"

namespace brachiation {

namespace {

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

double clip(double u, double limit) { return std::clamp(u, -limit, limit); }

}  // namespace

void ControllerGains::validate() const {
  require(lambda > 0.0, "controller.lambda", "must be > 0 1/s");
  require(gamma[0] > 0.0, "controller.gamma_ks", "must be > 0");
  require(gamma[1] > 0.0, "controller.gamma_bs", "must be > 0");
  require(gamma[2] > 0.0, "controller.gamma_kszs", "must be > 0");
  require(phi > 0.0, "controller.phi", "must be > 0");
  require(k_d0 > 0.0 && k_d0 < 1.0, "controller.k_d0", "must lie in (0, 1)");
  require(torque_limit > 0.0, "controller.torque_limit", "must be > 0 N m");
}

void BaselineGains::validate() const {
  require(kp >= 0.0, "baseline.kp", "must be >= 0");
  require(kd >= 0.0, "baseline.kd", "must be >= 0");
  require(torque_limit > 0.0, "controller.torque_limit", "must be > 0 N m");
}

double sliding_variable(double e, double edot, double lambda) { return edot + lambda * e; }

double sat(double x) { return std::clamp(x, -1.0, 1.0); }

double boundary_layer_trajectory(double s, double phi) {
  if (std::abs(s) <= phi) return 0.0;
  return s - phi * sat(s / phi);
}

double robust_term(double s, double phi, double k_d) { return k_d * sat(s / phi); }

AdaptationRates adaptation_rates(double s_delta, const RowVec3& h_row,
                                 const ControllerGains& gains) {
  AdaptationRates r;
  r.p_hat_rate = -(gains.gamma.cwiseProduct(h_row.transpose())) * s_delta;
  r.k_d_rate = gains.k_d0 * std::abs(s_delta);
  return r;
}

ControlOutput adaptive_robust_control(const RobotModel& model, const RobotState& state,
                                      const OutputTarget& target, const ControllerState& cstate,
                                      const ControllerGains& gains) {
  ControlOutput out;
  out.terms = model.affine_terms(state);
  auto& d = out.diag;
  d.e = target.y_d - output_angle(state.q);
  d.edot = target.yd_dot - output_rate(state);
  d.s = sliding_variable(d.e, d.edot, gains.lambda);
  d.s_delta = boundary_layer_trajectory(d.s, gains.phi);
  d.v = robust_term(d.s, gains.phi, cstate.k_d);
  const auto& t = out.terms;
  d.u_raw = (target.yd_ddot - t.g_term - t.h_row.dot(cstate.p_hat) + d.v + gains.lambda * d.edot) /
            t.alpha;
  out.u = clip(d.u_raw, gains.torque_limit);
  d.saturated = out.u != d.u_raw;
  return out;
}

ControlOutput feedback_linearization_control(const RobotModel& model, const RobotState& state,
                                             const OutputTarget& target,
                                             const UncertainParams& assumed,
                                             const BaselineGains& gains) {
  ControlOutput out;
  out.terms = model.affine_terms(state);
  auto& d = out.diag;
  d.e = target.y_d - output_angle(state.q);
  d.edot = target.yd_dot - output_rate(state);
  const auto& t = out.terms;
  d.u_raw = (target.yd_ddot - t.g_term - t.h_row.dot(assumed.p) + gains.kp * d.e +
             gains.kd * d.edot) /
            t.alpha;
  out.u = clip(d.u_raw, gains.torque_limit);
  d.saturated = out.u != d.u_raw;
  return out;
}

double lyapunov_value(double s_delta, const Vec3& p_tilde, double k_tilde, const Vec3& gamma) {
  return 0.5 * s_delta * s_delta + 0.5 * p_tilde.dot(p_tilde.cwiseQuotient(gamma)) +
         0.5 * k_tilde * k_tilde;
}

double ideal_robust_gain(double beta, double F_d, double k_d0) {
  return std::abs(beta * F_d) / k_d0;
}

}  // namespace brachiation
