#pragma once

namespace brachiation {

/// One classical fourth-order Runge-Kutta step of xdot = f(t, x).
/// `State` needs vector-space arithmetic (Eigen vectors qualify).
template <class State, class Derivative>
State rk4_step(const State& x, double t, double dt, Derivative&& f) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace brachiation
