// slamarm - Euler-Lagrange dynamics of the serial arm
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_DYNAMICS_HPP
#define SLAMARM_DYNAMICS_HPP

#include <array>

#include "slamarm/arm.hpp"
#include "slamarm/lie.hpp"

namespace slamarm {

/// Spatial inertia of one link at its frame origin, twist order [omega; v].
inline Matrix6d spatial_inertia(const LinkParameters& l) {
  const Matrix3d hc = hat(l.com);
  Matrix6d g = Matrix6d::Zero();
  g.topLeftCorner<3, 3>() = l.inertia - l.mass * hc * hc;
  g.topRightCorner<3, 3>() = l.mass * hc;
  g.bottomLeftCorner<3, 3>() = -l.mass * hc;
  g.bottomRightCorner<3, 3>() = l.mass * Matrix3d::Identity();
  return g;
}

/// Composite mass matrix M(q) = sum_i J_i^T G_i J_i, symmetric positive definite.
inline Matrix6d mass_matrix(const ArmParameters& arm, const Vector6d& q) {
  const auto js = body_jacobians(arm, q);
  Matrix6d m = Matrix6d::Zero();
  for (int i = 0; i < kJoints; ++i) {
    m += js[i].transpose() * spatial_inertia(arm.links[i]) * js[i];
  }
  return 0.5 * (m + m.transpose());
}

/// Analytic partials dM/dq_l from the bracket form of the Jacobian partials.
inline std::array<Matrix6d, kJoints> mass_matrix_partials(const ArmParameters& arm,
                                                          const Vector6d& q) {
  const auto js = body_jacobians(arm, q);
  std::array<Matrix6d, kJoints> out;
  for (int l = 0; l < kJoints; ++l) {
    out[l].setZero();
    for (int i = l; i < kJoints; ++i) {
      Matrix6d dj = Matrix6d::Zero();
      for (int k = 0; k < l; ++k) dj.col(k) = jacobian_column_partial(js[i], k, l);
      const Matrix6d gi = spatial_inertia(arm.links[i]);
      const Matrix6d term = dj.transpose() * gi * js[i];
      out[l] += term + term.transpose();
    }
  }
  return out;
}

/// Coriolis matrix from Christoffel symbols of the first kind, which makes
/// Mdot - 2C antisymmetric by construction.
inline Matrix6d coriolis(const ArmParameters& arm, const Vector6d& q, const Vector6d& qd) {
  const auto dm = mass_matrix_partials(arm, q);
  Matrix6d c = Matrix6d::Zero();
  for (int i = 0; i < kJoints; ++i) {
    for (int j = 0; j < kJoints; ++j) {
      double acc = 0.0;
      for (int k = 0; k < kJoints; ++k) {
        acc += 0.5 * (dm[k](i, j) + dm[j](i, k) - dm[i](j, k)) * qd(k);
      }
      c(i, j) = acc;
    }
  }
  return c;
}

/// Gravitational potential energy.
inline double gravity_potential(const ArmParameters& arm, const Vector6d& q) {
  const auto t = link_frames(arm, q);
  double u = 0.0;
  for (int i = 0; i < kJoints; ++i) {
    const Vector3d com_world = t[i + 1].topLeftCorner<3, 3>() * arm.links[i].com +
                               t[i + 1].topRightCorner<3, 1>();
    u -= arm.links[i].mass * arm.gravity.dot(com_world);
  }
  return u;
}

/// Gravity torque G(q) = d(potential energy)/dq via the com Jacobians.
inline Vector6d gravity_torque(const ArmParameters& arm, const Vector6d& q) {
  const auto t = link_frames(arm, q);
  const auto js = body_jacobians(arm, q);
  Vector6d g = Vector6d::Zero();
  for (int i = 0; i < kJoints; ++i) {
    const Matrix3d r = t[i + 1].topLeftCorner<3, 3>();
    // world-frame velocity of the com: R (v + omega x com)
    const Eigen::Matrix<double, 3, 6> jcom =
        r * (js[i].bottomRows<3>() - hat(arm.links[i].com) * js[i].topRows<3>());
    g -= arm.links[i].mass * (jcom.transpose() * arm.gravity);
  }
  return g;
}

/// Viscous plus smoothed Coulomb friction; qd^T F(qd) >= 0.
inline Vector6d friction_torque(const ArmParameters& arm, const Vector6d& qd) {
  Vector6d f;
  for (int i = 0; i < kJoints; ++i) {
    f(i) = arm.links[i].viscous * qd(i) +
           arm.links[i].coulomb * std::tanh(qd(i) / arm.coulomb_smoothing);
  }
  return f;
}

/// N(q, qd) = C(q, qd) qd + G(q) + F(qd).
inline Vector6d bias_term(const ArmParameters& arm, const JointState& s) {
  return coriolis(arm, s.q, s.qd) * s.qd + gravity_torque(arm, s.q) +
         friction_torque(arm, s.qd);
}

/// qdd = M^{-1} (tau - C qd - G - F).
inline Vector6d forward_dynamics(const ArmParameters& arm, const JointState& s,
                                 const Vector6d& tau) {
  return mass_matrix(arm, s.q).ldlt().solve(tau - bias_term(arm, s));
}

/// tau = M qdd + C qd + G + F.
inline Vector6d inverse_dynamics(const ArmParameters& arm, const JointState& s,
                                 const Vector6d& qdd) {
  return mass_matrix(arm, s.q) * qdd + bias_term(arm, s);
}

/// Everything the simulator needs at one joint state, computed from a single
/// kinematics pass (the free functions above recompute it per call).
struct ArmEval {
  Matrix6d mass;
  Vector6d bias;      // C qd + G + F
  Vector6d gravity;
  Matrix6d jac;       // end-effector body Jacobian
  Matrix6d jac_dot;
  RigidPose pose;     // FK of the end-effector
  Vector6d twist;     // jac * qd
};

inline ArmEval evaluate_arm(const ArmParameters& arm, const JointState& s) {
  const auto frames = link_frames(arm, s.q);
  const auto js = body_jacobians(arm, s.q);

  ArmEval out;
  out.pose = RigidPose::from_homogeneous(frames[kJoints]);

  out.mass = Matrix6d::Zero();
  std::array<Matrix6d, kJoints> inertias;
  for (int i = 0; i < kJoints; ++i) {
    inertias[i] = spatial_inertia(arm.links[i]);
    out.mass += js[i].transpose() * inertias[i] * js[i];
  }
  out.mass = 0.5 * (out.mass + out.mass.transpose());

  std::array<Matrix6d, kJoints> dm;
  for (int l = 0; l < kJoints; ++l) {
    dm[l].setZero();
    for (int i = l; i < kJoints; ++i) {
      Matrix6d dj = Matrix6d::Zero();
      for (int k = 0; k < l; ++k) dj.col(k) = jacobian_column_partial(js[i], k, l);
      const Matrix6d term = dj.transpose() * inertias[i] * js[i];
      dm[l] += term + term.transpose();
    }
  }
  Matrix6d c = Matrix6d::Zero();
  for (int i = 0; i < kJoints; ++i) {
    for (int jj = 0; jj < kJoints; ++jj) {
      double acc = 0.0;
      for (int k = 0; k < kJoints; ++k) {
        acc += 0.5 * (dm[k](i, jj) + dm[jj](i, k) - dm[i](jj, k)) * s.qd(k);
      }
      c(i, jj) = acc;
    }
  }

  out.gravity.setZero();
  for (int i = 0; i < kJoints; ++i) {
    const Matrix3d r = frames[i + 1].topLeftCorner<3, 3>();
    const Eigen::Matrix<double, 3, 6> jcom =
        r * (js[i].bottomRows<3>() - hat(arm.links[i].com) * js[i].topRows<3>());
    out.gravity -= arm.links[i].mass * (jcom.transpose() * arm.gravity);
  }
  out.bias = c * s.qd + out.gravity + friction_torque(arm, s.qd);

  out.jac = js[kJoints - 1];
  out.jac_dot.setZero();
  for (int k = 0; k < kJoints; ++k) {
    for (int l = k + 1; l < kJoints; ++l) {
      out.jac_dot.col(k) += jacobian_column_partial(out.jac, k, l) * s.qd(l);
    }
  }
  out.twist = out.jac * s.qd;
  return out;
}

}  // namespace slamarm

#endif  // SLAMARM_DYNAMICS_HPP
