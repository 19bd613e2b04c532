// slamarm - 6-DOF serial arm: DH kinematics, body Jacobian and its derivatives
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_ARM_HPP
#define SLAMARM_ARM_HPP

#include <array>
#include <stdexcept>

#include "slamarm/lie.hpp"

namespace slamarm {

inline constexpr int kJoints = 6;

/// One revolute link, classic Denavit-Hartenberg convention:
/// A_i(q) = Rz(q + theta_offset) Tz(d) Tx(a) Rx(alpha).
/// Mass properties are expressed in the link frame (frame i).
struct LinkParameters {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double mass = 1.0;
  Vector3d com = Vector3d::Zero();
  Matrix3d inertia = Matrix3d::Identity();  // about the com, link frame
  double viscous = 0.0;
  double coulomb = 0.0;
};

struct ArmParameters {
  std::array<LinkParameters, kJoints> links;
  Vector3d gravity = Vector3d(0.0, 0.0, -9.81);
  double coulomb_smoothing = 1e-3;  // rad/s, tanh band

  void validate() const {
    for (const auto& l : links) {
      if (l.mass <= 0.0) throw std::invalid_argument("ArmParameters: masses must be positive");
      if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("ArmParameters: inertia tensors must be symmetric");
      }
      const Eigen::SelfAdjointEigenSolver<Matrix3d> es(l.inertia);
      if (es.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("ArmParameters: inertia tensors must be positive definite");
      }
      if (l.viscous < 0.0 || l.coulomb < 0.0) {
        throw std::invalid_argument("ArmParameters: friction coefficients must be nonnegative");
      }
    }
    if (coulomb_smoothing <= 0.0) {
      throw std::invalid_argument("ArmParameters: coulomb_smoothing must be positive");
    }
  }
};

struct JointState {
  Vector6d q = Vector6d::Zero();
  Vector6d qd = Vector6d::Zero();
};

namespace detail {

inline Matrix4d rot_z_h(double t) {
  Matrix4d m = Matrix4d::Identity();
  const double c = std::cos(t), s = std::sin(t);
  m(0, 0) = c; m(0, 1) = -s;
  m(1, 0) = s; m(1, 1) = c;
  return m;
}

inline Matrix4d rot_x_h(double t) {
  Matrix4d m = Matrix4d::Identity();
  const double c = std::cos(t), s = std::sin(t);
  m(1, 1) = c; m(1, 2) = -s;
  m(2, 1) = s; m(2, 2) = c;
  return m;
}

inline Matrix4d translation_h(const Vector3d& p) {
  Matrix4d m = Matrix4d::Identity();
  m.topRightCorner<3, 1>() = p;
  return m;
}

/// Constant tail of the joint transform (everything after the q-rotation).
inline Matrix4d dh_fixed(const LinkParameters& l) {
  return translation_h(Vector3d(0, 0, l.d)) * translation_h(Vector3d(l.a, 0, 0)) *
         rot_x_h(l.alpha);
}

inline Matrix4d dh_joint(const LinkParameters& l, double q) {
  return rot_z_h(q + l.theta_offset) * dh_fixed(l);
}

}  // namespace detail

/// Cumulative link frames T_{0,i}, entry 0 is the base.
inline std::array<Matrix4d, kJoints + 1> link_frames(const ArmParameters& arm, const Vector6d& q) {
  std::array<Matrix4d, kJoints + 1> t;
  t[0] = Matrix4d::Identity();
  for (int i = 0; i < kJoints; ++i) t[i + 1] = t[i] * detail::dh_joint(arm.links[i], q(i));
  return t;
}

/// Pose of the end-effector frame in the base frame.
inline RigidPose forward_kinematics(const ArmParameters& arm, const Vector6d& q) {
  return RigidPose::from_homogeneous(link_frames(arm, q)[kJoints]);
}

/// Body Jacobians of every link frame, rows ordered [omega; v] so that
/// J_i qd is the body twist of frame i. Column k of link i's Jacobian is
/// Ad_{B^{-1}} [e3; 0] with B = G_k A_{k+1} ... A_i, built by the downward
/// recursion B <- G_{k-1} Rz(q_k + off_k) B.
inline std::array<Matrix6d, kJoints> body_jacobians(const ArmParameters& arm, const Vector6d& q) {
  std::array<Matrix6d, kJoints> js;
  Vector6d zaxis = Vector6d::Zero();
  zaxis(2) = 1.0;
  for (int i = 0; i < kJoints; ++i) {
    js[i].setZero();
    Matrix4d b = detail::dh_fixed(arm.links[i]);
    for (int k = i;; --k) {
      const RigidPose binv = RigidPose::from_homogeneous(b).inverse();
      js[i].col(k) = adjoint(binv) * zaxis;
      if (k == 0) break;
      b = detail::dh_fixed(arm.links[k - 1]) *
          detail::rot_z_h(q(k) + arm.links[k].theta_offset) * b;
    }
  }
  return js;
}

/// End-effector body Jacobian (Eq.-style twist rows [omega; v]).
inline Matrix6d jacobian(const ArmParameters& arm, const Vector6d& q) {
  return body_jacobians(arm, q)[kJoints - 1];
}

/// Partial of column k of a body Jacobian with respect to joint l:
/// nonzero only for k < l <= i, where it is the se(3) bracket [J_k, J_l].
inline Vector6d jacobian_column_partial(const Matrix6d& j, int k, int l) {
  return se3_bracket(j.col(k), j.col(l));
}

/// Time derivative of the end-effector body Jacobian along (q, qd).
inline Matrix6d jacobian_dot(const ArmParameters& arm, const Vector6d& q, const Vector6d& qd) {
  const Matrix6d j = jacobian(arm, q);
  Matrix6d jd = Matrix6d::Zero();
  for (int k = 0; k < kJoints; ++k) {
    for (int l = k + 1; l < kJoints; ++l) {
      jd.col(k) += jacobian_column_partial(j, k, l) * qd(l);
    }
  }
  return jd;
}

/// Damped least-squares inverse-kinematics step helper: iterates q until the
/// body-frame pose error log drops below tol. Steps are capped and angles
/// wrapped so the solution stays on the branch of the seed. Deterministic;
/// throws if it fails to converge.
inline Vector6d solve_ik(const ArmParameters& arm, const RigidPose& target, const Vector6d& q0,
                         double tol = 1e-10, int max_iters = 500, double damping = 1e-4) {
  auto wrap = [](double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
  };
  Vector6d q = q0;
  for (int it = 0; it < max_iters; ++it) {
    const RigidPose x = forward_kinematics(arm, q);
    const Twist err = se3_log(x.inverse() * target);
    if (err.vector().norm() < tol) {
      for (int i = 0; i < kJoints; ++i) q(i) = wrap(q(i));
      return q;
    }
    const Matrix6d j = jacobian(arm, q);
    const Matrix6d jjt = j * j.transpose() + damping * damping * Matrix6d::Identity();
    Vector6d step = j.transpose() * jjt.ldlt().solve(err.vector());
    const double norm = step.norm();
    if (norm > 0.5) step *= 0.5 / norm;
    q += step;
  }
  throw std::runtime_error("solve_ik: did not converge");
}

}  // namespace slamarm

#endif  // SLAMARM_ARM_HPP
