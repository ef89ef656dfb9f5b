#include "lagrangian_oracle.hpp"

#include <cmath>

namespace brachiation::oracle {

namespace {

struct Body {
  Eigen::Vector2d com1;
  Eigen::Vector2d elbow;
  Eigen::Vector2d com2;
};

// Positions in the plane with the pivot at (0, z).
Body place(const RobotParams& p, const Eigen::Vector3d& q) {
  const double a1 = q[0];
  const double a2 = q[0] + q[1];
  const Eigen::Vector2d pivot(0.0, q[2]);
  const Eigen::Vector2d u1(std::sin(a1), -std::cos(a1));
  const Eigen::Vector2d u2(std::sin(a2), -std::cos(a2));
  Body b;
  b.com1 = pivot + p.d1 * u1;
  b.elbow = pivot + p.l1 * u1;
  b.com2 = b.elbow + p.d2 * u2;
  return b;
}

}  // namespace

double kinetic_energy(const RobotParams& p, const Eigen::Vector3d& q,
                      const Eigen::Vector3d& qdot) {
  // Each point is linear in the link unit vectors, whose rates are the
  // perpendicular unit vectors times the absolute link rates.
  const double a1 = q[0];
  const double a2 = q[0] + q[1];
  const double w1 = qdot[0];
  const double w2 = qdot[0] + qdot[1];
  const Eigen::Vector2d t1(std::cos(a1), std::sin(a1));
  const Eigen::Vector2d t2(std::cos(a2), std::sin(a2));
  const Eigen::Vector2d vz(0.0, qdot[2]);
  const Eigen::Vector2d v_com1 = vz + p.d1 * w1 * t1;
  const Eigen::Vector2d v_elbow = vz + p.l1 * w1 * t1;
  const Eigen::Vector2d v_com2 = v_elbow + p.d2 * w2 * t2;
  return 0.5 * p.m1 * v_com1.squaredNorm() + 0.5 * p.m0 * v_elbow.squaredNorm() +
         0.5 * p.m2 * v_com2.squaredNorm() + 0.5 * p.I1 * w1 * w1 + 0.5 * p.I2 * w2 * w2;
}

double potential_energy(const RobotParams& p, const Eigen::Vector3d& q) {
  const Body b = place(p, q);
  return p.gravity * (p.m1 * b.com1.y() + p.m0 * b.elbow.y() + p.m2 * b.com2.y());
}

Eigen::Matrix3d inertia(const RobotParams& p, const Eigen::Vector3d& q) {
  Eigen::Matrix3d M;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 3; ++i) {
    M(i, i) = 2.0 * kinetic_energy(p, q, I.col(i));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double both = kinetic_energy(p, q, I.col(i) + I.col(j));
      M(i, j) = both - 0.5 * M(i, i) - 0.5 * M(j, j);
      M(j, i) = M(i, j);
    }
  }
  return M;
}

Eigen::Vector3d gravity(const RobotParams& p, const Eigen::Vector3d& q, double h) {
  Eigen::Vector3d D;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d qp = q;
    Eigen::Vector3d qm = q;
    qp[i] += h;
    qm[i] -= h;
    D[i] = (potential_energy(p, qp) - potential_energy(p, qm)) / (2.0 * h);
  }
  return D;
}

Eigen::Vector3d coriolis(const RobotParams& p, const Eigen::Vector3d& q,
                         const Eigen::Vector3d& qdot, double h) {
  const Eigen::Matrix3d M_dot = (inertia(p, q + h * qdot) - inertia(p, q - h * qdot)) / (2.0 * h);
  Eigen::Vector3d dT_dq;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d qp = q;
    Eigen::Vector3d qm = q;
    qp[i] += h;
    qm[i] -= h;
    dT_dq[i] = (kinetic_energy(p, qp, qdot) - kinetic_energy(p, qm, qdot)) / (2.0 * h);
  }
  return M_dot * qdot - dT_dq;
}

Eigen::Vector3d forward_dynamics(const RobotParams& p, const Eigen::Vector3d& q,
                                 const Eigen::Vector3d& qdot, double u, double F_c) {
  const Eigen::Vector3d tau(0.0, u, F_c);
  return inertia(p, q).fullPivLu().solve(tau - coriolis(p, q, qdot) - gravity(p, q));
}

}  // namespace brachiation::oracle
