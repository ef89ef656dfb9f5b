#include "validation_suite.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "brachiation/errors.hpp"
#include "brachiation/rk4.hpp"
#include "lagrangian_oracle.hpp"

namespace brachiation::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;
using Vec7 = Eigen::Matrix<double, 7, 1>;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class A, class B>
double rel(const A& a, const B& b) {
  return (a - b).norm() / std::max(b.norm(), 1.0);
}

RobotState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> rate(-5.0, 5.0);
  std::uniform_real_distribution<double> height(1.0, 2.5);
  RobotState s;
  s.q = Vec3(angle(rng), angle(rng), height(rng));
  s.qdot = Vec3(rate(rng), rate(rng), rate(rng));
  return s;
}

// Robot on the spring-damper with u = 0; the last entry accumulates b_s zdot^2.
Vec7 integrate_on_spring(const RobotModel& model, const SpringDamperParams& sd, Vec7 x,
                         double dt, int steps) {
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

RobotState head(const Vec7& x) { return {x.segment<3>(0), x.segment<3>(3)}; }

}  // namespace

CheckResult check_dynamics_oracle(int n, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const RobotModel model;
  const auto& p = model.params();
  std::mt19937_64 rng(seed);
  CheckResult r{"dynamics oracle", false, 0.0, 1e-6, 0.0, ""};
  for (int i = 0; i < n; ++i) {
    const RobotState s = random_state(rng);
    const ManipulatorMatrices m = model.manipulator_matrices(s);
    r.worst = std::max({r.worst, rel(m.M, inertia(p, s.q)), rel(m.Cqdot, coriolis(p, s.q, s.qdot)),
                        rel(m.D, gravity(p, s.q))});
  }
  r.seconds = seconds_since(t0);
  r.passed = r.worst < r.tolerance && r.seconds < 10.0;
  r.detail = fmt::format("{} states, max rel err {:.3g}, {:.2f} s", n, r.worst, r.seconds);
  return r;
}

CheckResult check_affine_equivalence(int n, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const RobotModel model;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ks(100.0, 1500.0);
  std::uniform_real_distribution<double> bs(0.0, 50.0);
  std::uniform_real_distribution<double> zs(1.0, 2.5);
  std::uniform_real_distribution<double> force(-20.0, 20.0);
  std::uniform_real_distribution<double> torque(-10.0, 10.0);
  CheckResult r{"affine equivalence", false, 0.0, 1e-8, 0.0, ""};
  int skipped = 0;
  for (int i = 0; i < n; ++i) {
    const RobotState s = random_state(rng);
    const SpringDamperParams sd{ks(rng), bs(rng), zs(rng)};
    const double F_d = force(rng);
    const double u = torque(rng);
    const Vec3 p = UncertainParams::from(sd).p;
    AffineTerms t;
    try {
      t = model.affine_terms(s);
    } catch (const SingularityError&) {
      ++skipped;
      continue;
    }
    const double ydd_affine = t.g_term + t.h_row.dot(p) + t.beta * F_d + t.alpha * u;
    const Vec3 qdd =
        model.forward_dynamics(s, u, spring_damper_force(s.q[2], s.qdot[2], sd) + F_d);
    const double ydd = qdd[0] + 0.5 * qdd[1];
    r.worst = std::max(r.worst, std::abs(ydd_affine - ydd) / std::max(std::abs(ydd), 1.0));
  }
  r.seconds = seconds_since(t0);
  r.passed = r.worst < r.tolerance && skipped < n / 100 + 1;
  r.detail = fmt::format("{} tuples ({} singular), max rel err {:.3g}", n, skipped, r.worst);
  return r;
}

CheckResult check_energy_conservation() {
  const auto t0 = Clock::now();
  const RobotModel model;
  const SpringDamperParams sd{680.0, 0.0, 1.9};
  Vec7 x;
  x << -48.0 * kPi / 180.0, -98.0 * kPi / 180.0, 1.84, 0.5, -1.0, 0.1, 0.0;
  const Vec7 y = integrate_on_spring(model, sd, x, 1e-5, 100000);
  const double e0 = model.total_energy(head(x), sd);
  const double e1 = model.total_energy(head(y), sd);
  CheckResult r{"energy conservation", false, std::abs(e1 - e0) / std::abs(e0), 1e-6, 0.0, ""};
  r.seconds = seconds_since(t0);
  r.passed = r.worst < r.tolerance;
  r.detail = fmt::format("1 s undamped, |dE|/E {:.3g}", r.worst);
  return r;
}

CheckResult check_energy_dissipation() {
  const auto t0 = Clock::now();
  const RobotModel model;
  const SpringDamperParams sd{680.0, 20.0, 1.9};
  Vec7 x;
  x << -48.0 * kPi / 180.0, -98.0 * kPi / 180.0, 1.75, 0.5, -1.0, 0.4, 0.0;
  const Vec7 y = integrate_on_spring(model, sd, x, 1e-5, 100000);
  const double decrement = model.total_energy(head(x), sd) - model.total_energy(head(y), sd);
  CheckResult r{"energy dissipation", false, std::abs(decrement - y[6]) / std::abs(y[6]), 1e-4,
                0.0, ""};
  r.seconds = seconds_since(t0);
  r.passed = y[6] > 0.0 && r.worst < r.tolerance;
  r.detail = fmt::format("1 s damped, decrement {:.6g} J vs dissipated {:.6g} J, rel {:.3g}",
                         decrement, y[6], r.worst);
  return r;
}

}  // namespace brachiation::oracle
