#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "brachiation/dynamics.hpp"

namespace brachiation {

/// How `CableParams::stiffness` is read.
enum class StiffnessMode {
  kPerSegment,  // axial stiffness of each segment
  kTotal,       // EA / L of the whole cable; each segment gets n_segments times it
};

/// Planar lumped-mass cable pinned at both supports.
struct CableParams {
  double length = 8.0;          // m, unstretched
  double linear_mass = 0.25;    // kg/m
  double stiffness = 785400.0;  // N/m, see stiffness_mode
  StiffnessMode stiffness_mode = StiffnessMode::kPerSegment;
  double segment_damping = 4.0;  // N s/m
  int n_segments = 32;
  Vec2 support_left{0.0, 2.0};
  Vec2 support_right{8.0, 2.0};
  double gravity = 9.81;
  double substep = 2e-6;  // s, explicit cable step inside each robot step

  double segment_stiffness() const;
  double rest_length() const { return length / n_segments; }
  /// Mass lumped at an interior node.
  double node_mass() const { return linear_mass * rest_length(); }
  double total_mass() const { return linear_mass * length; }
  std::size_t node_count() const { return static_cast<std::size_t>(n_segments) + 1; }

  void validate() const;
};

/// Node positions and velocities. Supports are the first and last nodes. The
/// attached node is slaved vertically to the robot pivot and carries no mass.
struct CableState {
  std::vector<Vec2> pos;
  std::vector<Vec2> vel;
  std::optional<std::size_t> attach_index;
};

/// Downward point load (N) applied at a node during relaxation.
struct NodeLoad {
  std::size_t index = 0;
  double force = 0.0;
};

struct RelaxationOptions {
  double tolerance = 1e-6;  // N, infinity norm of the free-node residual
  int max_iterations = 200;
};

/// Unstretched straight chord between the supports.
CableState straight_cable(const CableParams& params);

/// Index of the node whose x coordinate is nearest to `x`, restricted to
/// interior nodes.
std::size_t nearest_interior_node(const CableState& state, double x);

/// Sagged rest shape under gravity and an optional point load, relaxed from a
/// shallow parabola by damped Newton iterations on the tangent stiffness.
/// When a load is given, the loaded node becomes the attachment. Throws
/// ConvergenceError past the iteration cap.
CableState static_equilibrium(const CableParams& params,
                              const std::optional<NodeLoad>& load = std::nullopt,
                              const RelaxationOptions& options = {});

/// Axial spring-damper forces summed per node, without gravity. Segments carry
/// tension only.
std::vector<Vec2> segment_forces(const CableState& state, const CableParams& params);

/// Segment forces plus nodal gravity (the attached node is massless).
std::vector<Vec2> internal_forces(const CableState& state, const CableParams& params);

/// Vertical force the cable exerts on the pivot when the attachment node is
/// held at (z_g, zdot_g). The node's horizontal coordinate is unchanged.
/// Throws AttachmentError without an attachment.
double attachment_reaction(const CableState& state, const CableParams& params, double z_g,
                           double zdot_g);

/// Kinetic, gravitational (zero at z = 0) and elastic energy of the free nodes.
double cable_energy(const CableState& state, const CableParams& params);

/// Time derivative of the joint robot + cable state.
struct CoupledDerivative {
  Vec3 qdot;
  Vec3 qddot;
  std::vector<Vec2> node_vel;
  std::vector<Vec2> node_acc;
  double reaction = 0.0;
};

CoupledDerivative coupled_derivative(const RobotModel& robot, const RobotState& state,
                                     const CableState& cable, const CableParams& params,
                                     double u);

/// Advances the cable over [0, dt] with semi-implicit Euler substeps of at most
/// params.substep while the attachment node moves linearly from z_begin to
/// z_end. Supports never move.
void advance_cable(CableState& cable, const CableParams& params, double dt, double z_begin,
                   double z_end);

/// Distance from `point` to the cable polyline, with the closest point.
struct CurveDistance {
  double distance = 0.0;
  Vec2 closest;
};
CurveDistance distance_to_cable(const CableState& state, const Vec2& point);

/// Attaches the cable at `index`, pinning its vertical state to (z, zdot).
/// The previously attached node, if any, is released with its current state.
void reattach(CableState& state, std::size_t index, double z, double zdot);

}  // namespace brachiation
