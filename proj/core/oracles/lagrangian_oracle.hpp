#pragma once

#include <Eigen/Dense>

#include "brachiation/dynamics.hpp"

namespace brachiation::oracle {

/// Energies of the robot assembled from point masses and link inertias, with
/// no use of the closed-form matrices.
double kinetic_energy(const RobotParams& p, const Eigen::Vector3d& q, const Eigen::Vector3d& qdot);
double potential_energy(const RobotParams& p, const Eigen::Vector3d& q);

/// Inertia matrix by polarization of the kinetic energy (exact for a
/// quadratic form).
Eigen::Matrix3d inertia(const RobotParams& p, const Eigen::Vector3d& q);

/// Gravity vector as the central-difference gradient of the potential.
Eigen::Vector3d gravity(const RobotParams& p, const Eigen::Vector3d& q, double h = 1e-6);

/// C(q, qdot) qdot = (dM/dt) qdot - dT/dq with both terms by central
/// differences.
Eigen::Vector3d coriolis(const RobotParams& p, const Eigen::Vector3d& q,
                         const Eigen::Vector3d& qdot, double h = 1e-6);

/// qdd from the oracle matrices for generalized forces [0, u, F_c].
Eigen::Vector3d forward_dynamics(const RobotParams& p, const Eigen::Vector3d& q,
                                 const Eigen::Vector3d& qdot, double u, double F_c);

}  // namespace brachiation::oracle
