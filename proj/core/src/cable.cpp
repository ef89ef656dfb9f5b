#include "brachiation/cable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brachiation/errors.hpp"

namespace brachiation {

namespace {

bool is_free(const CableState& state, std::size_t i) {
  return i != 0 && i + 1 != state.pos.size() && state.attach_index != i;
}

/// Tension-only axial force of segment (i, i+1), applied to node i along +dir.
Vec2 segment_pull(const Vec2& xa, const Vec2& xb, const Vec2& va, const Vec2& vb, double rest,
                  double k, double c) {
  const Vec2 d = xb - xa;
  const double len = d.norm();
  if (!(len > 0.0)) return Vec2::Zero();
  const double stretch = len - rest;
  if (stretch <= 0.0) return Vec2::Zero();
  const Vec2 dir = d / len;
  const double rate = (vb - va).dot(dir);
  const double tension = std::max(0.0, k * stretch + c * rate);
  return tension * dir;
}

void accumulate_segment_forces(const CableState& state, const CableParams& params,
                               std::vector<Vec2>& out) {
  const std::size_t n = state.pos.size();
  out.assign(n, Vec2::Zero());
  const double k = params.segment_stiffness();
  const double c = params.segment_damping;
  const double rest = params.rest_length();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 f =
        segment_pull(state.pos[i], state.pos[i + 1], state.vel[i], state.vel[i + 1], rest, k, c);
    out[i] += f;
    out[i + 1] -= f;
  }
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

double CableParams::segment_stiffness() const {
  return stiffness_mode == StiffnessMode::kPerSegment ? stiffness : stiffness * n_segments;
}

void CableParams::validate() const {
  require(n_segments >= 8, "cable.n_segments", "must be >= 8");
  require(length > 0.0, "cable.length", "must be > 0 m");
  require(linear_mass > 0.0, "cable.linear_mass", "must be > 0 kg/m");
  require(stiffness > 0.0, "cable.stiffness", "must be > 0 N/m");
  require(segment_damping >= 0.0, "cable.segment_damping", "must be >= 0 N s/m");
  require(gravity > 0.0, "cable.gravity", "must be > 0 m/s^2");
  require(substep > 0.0, "cable.substep", "must be > 0 s");
  require(support_right.x() > support_left.x(), "cable.support_right_x",
          "must lie to the right of the left support");
  require((support_right - support_left).norm() <= length, "cable.length",
          "must be at least the support span");
}

CableState straight_cable(const CableParams& params) {
  CableState s;
  const std::size_t n = params.node_count();
  s.pos.resize(n);
  s.vel.assign(n, Vec2::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    s.pos[i] = (1.0 - f) * params.support_left + f * params.support_right;
  }
  return s;
}

std::size_t nearest_interior_node(const CableState& state, double x) {
  std::size_t best = 1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < state.pos.size(); ++i) {
    const double d = std::abs(state.pos[i].x() - x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

CableState static_equilibrium(const CableParams& params, const std::optional<NodeLoad>& load,
                              const RelaxationOptions& options) {
  CableState s = straight_cable(params);
  const std::size_t n = s.pos.size();
  if (load && (load->index == 0 || load->index + 1 >= n)) {
    throw AttachmentError("load must sit on an interior node");
  }
  const double node_weight = params.node_mass() * params.gravity;
  const double k = params.segment_stiffness();
  const double rest = params.rest_length();

  // Start from a shallow parabolic sag so every segment is in tension.
  const double sag = 0.02 * (params.support_right - params.support_left).norm();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    s.pos[i].y() -= 4.0 * sag * f * (1.0 - f);
  }

  std::vector<Vec2> force;
  auto residual_forces = [&](const CableState& st) {
    accumulate_segment_forces(st, params, force);
    double residual = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      force[i].y() -= (load && load->index == i) ? load->force : node_weight;
      residual = std::max(residual, force[i].cwiseAbs().maxCoeff());
    }
    return residual;
  };
  auto finish = [&](CableState& st) {
    for (auto& v : st.vel) v.setZero();
    if (load) st.attach_index = load->index;
    return st;
  };

  // Newton iterations on the tangent stiffness of the tensioned chain, with
  // step halving until the residual decreases.
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * (n - 2));
  Eigen::MatrixXd jac(dim, dim);
  Eigen::VectorXd rhs(dim);
  double residual = residual_forces(s);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (residual < options.tolerance) return finish(s);
    jac.setZero();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Vec2 d = s.pos[i + 1] - s.pos[i];
      const double len = d.norm();
      const double tension = k * std::max(0.0, len - rest);
      const Vec2 dir = d / len;
      const Eigen::Matrix2d outer = dir * dir.transpose();
      const Eigen::Matrix2d tangent =
          (len > rest ? k : 0.0) * outer +
          (tension / len) * (Eigen::Matrix2d::Identity() - outer);
      const bool a_free = i >= 1;
      const bool b_free = i + 2 < n;
      const Eigen::Index ia = 2 * static_cast<Eigen::Index>(i) - 2;
      const Eigen::Index ib = 2 * static_cast<Eigen::Index>(i);
      if (a_free) jac.block<2, 2>(ia, ia) -= tangent;
      if (b_free) jac.block<2, 2>(ib, ib) -= tangent;
      if (a_free && b_free) {
        jac.block<2, 2>(ia, ib) += tangent;
        jac.block<2, 2>(ib, ia) += tangent;
      }
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      rhs.segment<2>(2 * static_cast<Eigen::Index>(i) - 2) = -force[i];
    }
    const Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) break;
    const CableState base = s;
    double scale = 1.0;
    double trial = residual;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        s.pos[i] = base.pos[i] + scale * step.segment<2>(2 * static_cast<Eigen::Index>(i) - 2);
      }
      trial = residual_forces(s);
      if (trial < residual) break;
      scale *= 0.5;
    }
    if (!(trial < residual)) break;
    residual = trial;
  }
  if (residual < options.tolerance) return finish(s);
  throw ConvergenceError("cable relaxation did not converge within " +
                         std::to_string(options.max_iterations) + " iterations (residual " +
                         std::to_string(residual) + " N)");
}

std::vector<Vec2> segment_forces(const CableState& state, const CableParams& params) {
  std::vector<Vec2> out;
  accumulate_segment_forces(state, params, out);
  return out;
}

std::vector<Vec2> internal_forces(const CableState& state, const CableParams& params) {
  std::vector<Vec2> out = segment_forces(state, params);
  const double w = params.node_mass() * params.gravity;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (state.attach_index == i) continue;
    const bool end = (i == 0 || i + 1 == out.size());
    out[i].y() -= end ? 0.5 * w : w;
  }
  return out;
}

double attachment_reaction(const CableState& state, const CableParams& params, double z_g,
                           double zdot_g) {
  if (!state.attach_index) throw AttachmentError("cable has no attachment node");
  const std::size_t a = *state.attach_index;
  const Vec2 xa(state.pos[a].x(), z_g);
  const Vec2 va(0.0, zdot_g);
  const double k = params.segment_stiffness();
  const double c = params.segment_damping;
  const double rest = params.rest_length();
  // The pull of segment (a, a+1) on node a, and of segment (a-1, a) on node a.
  const Vec2 right = segment_pull(xa, state.pos[a + 1], va, state.vel[a + 1], rest, k, c);
  const Vec2 left = segment_pull(state.pos[a - 1], xa, state.vel[a - 1], va, rest, k, c);
  return (right - left).y();
}

double cable_energy(const CableState& state, const CableParams& params) {
  const std::size_t n = state.pos.size();
  const double m = params.node_mass();
  const double k = params.segment_stiffness();
  const double rest = params.rest_length();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_free(state, i)) continue;
    e += 0.5 * m * state.vel[i].squaredNorm() + m * params.gravity * state.pos[i].y();
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double stretch = std::max(0.0, (state.pos[i + 1] - state.pos[i]).norm() - rest);
    e += 0.5 * k * stretch * stretch;
  }
  return e;
}

CoupledDerivative coupled_derivative(const RobotModel& robot, const RobotState& state,
                                     const CableState& cable, const CableParams& params,
                                     double u) {
  if (!cable.attach_index) throw AttachmentError("cable has no attachment node");
  const std::size_t a = *cable.attach_index;
  CableState pinned = cable;
  pinned.pos[a].y() = state.q[2];
  pinned.vel[a] = Vec2(0.0, state.qdot[2]);

  CoupledDerivative d;
  d.reaction = attachment_reaction(pinned, params, state.q[2], state.qdot[2]);
  d.qdot = state.qdot;
  d.qddot = robot.forward_dynamics(state, u, d.reaction);

  const std::vector<Vec2> f = internal_forces(pinned, params);
  const double m = params.node_mass();
  const std::size_t n = cable.pos.size();
  d.node_vel.assign(n, Vec2::Zero());
  d.node_acc.assign(n, Vec2::Zero());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (i == a) {
      d.node_vel[i] = pinned.vel[i];
      d.node_acc[i] = Vec2(0.0, d.qddot[2]);
    } else {
      d.node_vel[i] = pinned.vel[i];
      d.node_acc[i] = f[i] / m;
    }
  }
  return d;
}

void advance_cable(CableState& cable, const CableParams& params, double dt, double z_begin,
                   double z_end) {
  const std::size_t n = cable.pos.size();
  const auto steps = static_cast<long>(std::ceil(dt / params.substep - 1e-9));
  const long count = std::max(1L, steps);
  const double h = dt / static_cast<double>(count);
  const double m = params.node_mass();
  const double inv_m = 1.0 / m;
  const double weight = m * params.gravity;
  const double k = params.segment_stiffness();
  const double c = params.segment_damping;
  const double rest = params.rest_length();
  const std::optional<std::size_t> a = cable.attach_index;
  const double z_rate = (z_end - z_begin) / dt;

  if (a) {
    cable.pos[*a].y() = z_begin;
    cable.vel[*a] = Vec2(0.0, z_rate);
  }
  std::vector<Vec2> force(n);
  for (long step = 1; step <= count; ++step) {
    for (auto& f : force) f.setZero();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Vec2 f = segment_pull(cable.pos[i], cable.pos[i + 1], cable.vel[i],
                                  cable.vel[i + 1], rest, k, c);
      force[i] += f;
      force[i + 1] -= f;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (a == i) continue;
      force[i].y() -= weight;
      cable.vel[i] += (h * inv_m) * force[i];
      cable.pos[i] += h * cable.vel[i];
    }
    if (a) {
      const double f = static_cast<double>(step) / static_cast<double>(count);
      cable.pos[*a].y() = z_begin + f * (z_end - z_begin);
    }
  }
}

CurveDistance distance_to_cable(const CableState& state, const Vec2& point) {
  CurveDistance best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < state.pos.size(); ++i) {
    const Vec2& a = state.pos[i];
    const Vec2 ab = state.pos[i + 1] - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((point - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 c = a + t * ab;
    const double d = (point - c).norm();
    if (d < best.distance) {
      best.distance = d;
      best.closest = c;
    }
  }
  return best;
}

void reattach(CableState& state, std::size_t index, double z, double zdot) {
  if (index == 0 || index + 1 >= state.pos.size()) {
    throw AttachmentError("attachment must be an interior node");
  }
  state.attach_index = index;
  state.pos[index].y() = z;
  state.vel[index] = Vec2(0.0, zdot);
}

}  // namespace brachiation
