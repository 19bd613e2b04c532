// slamarm - hybrid gradient feedback law on SE(3)
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_CONTROLLER_HPP
#define SLAMARM_CONTROLLER_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "slamarm/arm.hpp"
#include "slamarm/dynamics.hpp"
#include "slamarm/lie.hpp"

namespace slamarm {

struct ControllerGains {
  Matrix4d weight = 200.0 * Matrix4d::Identity();  // symmetric positive definite
  double damping = 5.0;                            // g_d, G_d = g_d I
  Vector3d switch_axis = Vector3d::UnitZ();        // fixed axis of the switched potential
  std::vector<double> theta_grid = {-M_PI / 2, -M_PI / 4, 0.0, M_PI / 4, M_PI / 2};
  double delta_c = 16.0;  // jump hysteresis
  double cond_limit = 1e6;
  double dls_damping = 1e-3;

  void validate() const {
    if ((weight - weight.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument("ControllerGains: weight must be symmetric");
    }
    if (Eigen::SelfAdjointEigenSolver<Matrix4d>(weight).eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("ControllerGains: weight must be positive definite");
    }
    if (damping <= 0.0 || delta_c <= 0.0) {
      throw std::invalid_argument("ControllerGains: damping and delta_c must be positive");
    }
    if (std::abs(switch_axis.norm() - 1.0) > kOrthonormalTol) {
      throw std::invalid_argument("ControllerGains: switch_axis must be a unit vector");
    }
    if (std::find_if(theta_grid.begin(), theta_grid.end(),
                     [](double h) { return h == 0.0; }) == theta_grid.end()) {
      throw std::invalid_argument("ControllerGains: theta_grid must contain 0");
    }
    for (double h : theta_grid) {
      if (std::abs(h) > M_PI / 2 + 1e-12) {
        throw std::invalid_argument("ControllerGains: grid angles must lie in [-pi/2, pi/2]");
      }
    }
  }
};

/// Desired pose and body twist; the twist is constant within a segment.
struct DesiredMotion {
  RigidPose x_d;
  Twist w_d;
};

struct ControllerState {
  double h = 0.0;  // current switch angle, an element of the grid
};

/// Left-invariant pose tracking error X_d^{-1} X.
inline RigidPose tracking_error(const RigidPose& x_d, const RigidPose& x) {
  return x_d.inverse() * x;
}

/// Velocity error: body twist minus the desired twist transported through
/// the inverse tracking error.
inline Twist velocity_error(const RigidPose& x_e, const Twist& w, const Twist& w_d) {
  return Twist(Vector6d(w.vector() - adjoint(x_e.inverse()) * w_d.vector()));
}

/// Switch pose: rotation by h about the fixed axis, zero translation.
inline RigidPose switch_pose(double h, const ControllerGains& gains) {
  return RigidPose(Rotation::axis_angle(h, gains.switch_axis), Vector3d::Zero());
}

/// Switched pose potential 0.5 tr((I - X_h X_e) W (I - X_h X_e)^T).
inline double controller_potential(const RigidPose& x_e, double h, const ControllerGains& gains) {
  if (std::abs(h) > M_PI / 2 + 1e-12) {
    throw std::invalid_argument("controller_potential: |h| must be <= pi/2");
  }
  const Matrix4d e = Matrix4d::Identity() - switch_pose(h, gains).homogeneous() * x_e.homogeneous();
  return 0.5 * (e * gains.weight * e.transpose()).trace();
}

/// Left-trivialized gradient of the potential as a 4x4 tangent-shaped matrix,
/// the projection of (I - (X_h X_e)^{-1}) W onto the se(3) shape. Satisfies
/// d/dt U(X_e exp(t V)) = <gradient_matrix, V>_F for every tangent V.
inline Matrix4d gradient_matrix(const RigidPose& x_e, double h, const ControllerGains& gains) {
  const RigidPose composite = switch_pose(h, gains) * x_e;
  const Matrix4d b =
      (Matrix4d::Identity() - composite.inverse().homogeneous()) * gains.weight;
  return pose_project(b);
}

/// The gradient as a 6-vector in the [vee; y/2] coordinates.
inline Vector6d controller_gradient(const RigidPose& x_e, double h, const ControllerGains& gains) {
  return pose_vee(gradient_matrix(x_e, h, gains));
}

/// Potentials over the switch grid at the current pose error.
inline std::vector<double> grid_potentials(const RigidPose& x_e, const ControllerGains& gains) {
  std::vector<double> out;
  out.reserve(gains.theta_grid.size());
  for (double h : gains.theta_grid) out.push_back(controller_potential(x_e, h, gains));
  return out;
}

/// Signed distance into the switch jump set (>= 0 activates the jump).
inline double switch_margin(const RigidPose& x_e, const ControllerState& state,
                            const ControllerGains& gains) {
  const std::vector<double> pots = grid_potentials(x_e, gains);
  return controller_potential(x_e, state.h, gains) -
         *std::min_element(pots.begin(), pots.end()) - gains.delta_c;
}

/// Hysteretic switch update: reset h to the grid argmin when the current
/// angle's potential exceeds the best by at least delta_c, otherwise hold.
inline ControllerState switch_update(const RigidPose& x_e, const ControllerState& state,
                                     const ControllerGains& gains) {
  const std::vector<double> pots = grid_potentials(x_e, gains);
  const int best = static_cast<int>(std::min_element(pots.begin(), pots.end()) - pots.begin());
  if (controller_potential(x_e, state.h, gains) - pots[best] >= gains.delta_c) {
    return {gains.theta_grid[best]};
  }
  return state;
}

/// Commanded body-twist rate. The gradient blocks are scaled so that, with
/// Zdot = -command, the Lyapunov function U + 0.5 |pose_vee(Y)|^2 dissipates
/// exactly: d/dt V = -damping * |pose_vee(Y)|^2 along flows. The last term
/// feeds the rotation of the transported reference twist forward.
inline Vector6d twist_rate_command(const RigidPose& x_e, const Twist& vel_err,
                                   const Twist& transported_ref, double h,
                                   const ControllerGains& gains) {
  const Matrix4d grad = gradient_matrix(x_e, h, gains);
  Vector6d grad_accel;
  grad_accel.head<3>() = 2.0 * vee(grad.topLeftCorner<3, 3>());
  grad_accel.tail<3>() = 4.0 * grad.topRightCorner<3, 1>();
  const Vector6d zy = vel_err.vector();
  return grad_accel + gains.damping * zy - se3_bracket(transported_ref.vector(), zy);
}

struct TorqueCommand {
  Vector6d tau = Vector6d::Zero();
  Vector6d twist_rate = Vector6d::Zero();  // commanded Zdot (negated command)
  bool singular = false;
  double jacobian_condition = 0.0;
};

/// Full feedback-linearizing torque: tau = N(q, qd) - M J^{-1} (Jdot qd + u),
/// with a damped least-squares fallback when J is ill conditioned.
inline TorqueCommand control_torque(const ArmParameters& arm, const JointState& joints,
                                    const RigidPose& x_e, const Twist& vel_err, double h,
                                    const ControllerGains& gains) {
  if (!joints.q.allFinite() || !joints.qd.allFinite()) {
    throw std::invalid_argument("control_torque: non-finite joint state");
  }
  const Matrix6d j = jacobian(arm, joints.q);
  const Matrix6d jd = jacobian_dot(arm, joints.q, joints.qd);
  const Vector6d z = j * joints.qd;
  // transported reference twist: Z - Y
  const Twist transported(Vector6d(z - vel_err.vector()));
  const Vector6d u = twist_rate_command(x_e, vel_err, transported, h, gains);

  Eigen::JacobiSVD<Matrix6d> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(5);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

  TorqueCommand cmd;
  cmd.jacobian_condition = cond;
  cmd.twist_rate = -u;
  const Vector6d rhs = jd * joints.qd + u;
  Vector6d qdd_cmd;
  if (cond > gains.cond_limit) {
    cmd.singular = true;
    const double lam2 = gains.dls_damping * gains.dls_damping;
    qdd_cmd = -(j.transpose() * (j * j.transpose() + lam2 * Matrix6d::Identity()).ldlt().solve(rhs));
  } else {
    qdd_cmd = -j.partialPivLu().solve(rhs);
  }
  cmd.tau = mass_matrix(arm, joints.q) * qdd_cmd + bias_term(arm, joints);
  return cmd;
}

}  // namespace slamarm

#endif  // SLAMARM_CONTROLLER_HPP
