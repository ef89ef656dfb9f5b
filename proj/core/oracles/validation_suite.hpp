#pragma once

#include <cstdint>
#include <string>

namespace brachiation::oracle {

/// Outcome of one property check. `worst` is the largest observed error
/// measure, `tolerance` the pinned bound it is held to.
struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

/// Closed-form M, C qdot and D against the finite-difference Lagrangian on
/// `n` random states. Relative tolerance 1e-6, runtime bound 10 s.
CheckResult check_dynamics_oracle(int n = 1000, std::uint64_t seed = 1);

/// Output decomposition against forward dynamics on `n` random
/// (state, p, F_d, u) tuples. Relative tolerance 1e-8.
CheckResult check_affine_equivalence(int n = 1000, std::uint64_t seed = 2);

/// Undamped robot plus spring conserves energy over 1 s (1e-6 relative).
CheckResult check_energy_conservation();

/// Damped energy decrement equals the integrated b_s zdot^2 (1e-4 relative).
CheckResult check_energy_dissipation();

}  // namespace brachiation::oracle
