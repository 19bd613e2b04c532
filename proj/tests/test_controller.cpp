// slamarm - hybrid controller unit tests and dissipation oracles
// SPDX-License-Identifier: MIT

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "slamarm/controller.hpp"
#include "slamarm/scenario.hpp"

using namespace slamarm;
using slamarm::testing::relative_error;
using slamarm::testing::Sampler;

namespace {

ControllerGains paper_gains() {
  ControllerGains g;
  g.weight = 200.0 * Matrix4d::Identity();
  g.damping = 5.0;
  g.delta_c = 16.0;
  return g;
}

}  // namespace

TEST_CASE("tracking error identities") {
  Sampler s(71);
  const RigidPose x = s.pose();
  REQUIRE((tracking_error(x, x).homogeneous() - Matrix4d::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
  REQUIRE((tracking_error(RigidPose::identity(), x).homogeneous() - x.homogeneous())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("tracking error dynamics match X_e Y") {
  Sampler s(72);
  for (int trial = 0; trial < 30; ++trial) {
    const RigidPose x0 = s.pose();
    const RigidPose xd0 = s.pose();
    const Twist w = s.twist();
    const Twist wd = s.twist();
    const double h = 1e-6;
    auto xe_at = [&](double t) {
      const RigidPose x = x0 * se3_exp(w, t);
      const RigidPose xd = xd0 * se3_exp(wd, t);
      return tracking_error(xd, x).homogeneous();
    };
    const Matrix4d fd = (xe_at(h) - xe_at(-h)) / (2 * h);
    const RigidPose xe = tracking_error(xd0, x0);
    const Twist y = velocity_error(xe, w, wd);
    const Matrix4d expected = xe.homogeneous() * y.matrix();
    REQUIRE((fd - expected).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("velocity error transport") {
  Sampler s(73);
  const Twist w = s.twist();
  REQUIRE(velocity_error(RigidPose::identity(), w, w).vector().norm() < 1e-15);
  const RigidPose xe = s.pose();
  REQUIRE((velocity_error(xe, w, Twist::zero()).vector() - w.vector()).norm() == 0.0);
  // adjoint route equals matrix conjugation projected onto the algebra shape
  const Twist wd = s.twist();
  const Matrix4d conj =
      xe.inverse().homogeneous() * wd.matrix() * xe.homogeneous();
  const Vector6d via_adjoint = adjoint(xe.inverse()) * wd.vector();
  REQUIRE((pose_vee(pose_project(conj)) - pose_vee(Twist(via_adjoint).matrix())).norm() < 1e-12);
}

TEST_CASE("pose potential basic properties") {
  const ControllerGains gains = paper_gains();
  REQUIRE(controller_potential(RigidPose::identity(), 0.0, gains) == 0.0);
  Sampler s(74);
  for (int trial = 0; trial < 50; ++trial) {
    const RigidPose xe = s.pose();
    const double u = controller_potential(xe, 0.0, gains);
    REQUIRE(u > 0.0);
    ControllerGains unit = gains;
    unit.weight = Matrix4d::Identity();
    REQUIRE(relative_error(u, 200.0 * controller_potential(xe, 0.0, unit)) < 1e-12);
  }
  REQUIRE_THROWS_AS(controller_potential(RigidPose::identity(), 2.0, gains),
                    std::invalid_argument);
}

TEST_CASE("pose gradient matches finite differences of the potential") {
  Sampler s(75);
  ControllerGains gains = paper_gains();
  gains.weight = Matrix4d(Eigen::Vector4d(300.0, 200.0, 100.0, 250.0).asDiagonal());
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RigidPose xe = s.pose();
    const double h = s.uniform(-M_PI / 2, M_PI / 2);
    const Twist v = s.twist();
    const double eps = 1e-6;
    auto u_at = [&](double t) {
      return controller_potential(RigidPose(xe * se3_exp(v, t)), h, gains);
    };
    const double fd = (u_at(eps) - u_at(-eps)) / (2 * eps);
    const Matrix4d grad = gradient_matrix(xe, h, gains);
    const double ip = (grad.transpose() * v.matrix()).trace();
    if (std::abs(fd) > 1e-6) {
      REQUIRE(relative_error(ip, fd) < 1e-4);
      ++checked;
    }
  }
  REQUIRE(checked > 80);

  // minimum of the unswitched potential
  REQUIRE(controller_gradient(RigidPose::identity(), 0.0, gains).norm() < 1e-12);
  // switching reshapes the field
  const RigidPose xe = s.pose();
  REQUIRE((controller_gradient(xe, 0.0, gains) - controller_gradient(xe, M_PI / 4, gains))
              .norm() > 1e-6);
}

TEST_CASE("switch update fires on antipodal errors and lands in the flow set") {
  // the half-turn tie: with a scalar weight, rotating a pi error about an
  // orthogonal axis keeps every grid candidate at angle pi, so the potentials
  // tie and no jump can fire; an anisotropic weight breaks the tie
  ControllerGains gains = paper_gains();
  SECTION("scalar weight ties on orthogonal-axis errors") {
    const RigidPose xe(Rotation::axis_angle(M_PI, Vector3d::UnitX()), Vector3d::Zero());
    const auto pots = grid_potentials(xe, gains);
    for (double p : pots) REQUIRE(std::abs(p - pots[0]) < 1e-9);
    REQUIRE(switch_update(xe, ControllerState{0.0}, gains).h == 0.0);
  }
  SECTION("anisotropic weight escapes") {
    gains.weight = Matrix4d(Eigen::Vector4d(100.0, 320.0, 150.0, 200.0).asDiagonal());
    gains.delta_c = 10.0;
    const RigidPose xe(Rotation::axis_angle(M_PI, Vector3d::UnitX()), Vector3d::Zero());
    const ControllerState st{0.0};
    REQUIRE(switch_margin(xe, st, gains) >= 0.0);
    const ControllerState after = switch_update(xe, st, gains);
    REQUIRE(after.h != 0.0);
    const double drop =
        controller_potential(xe, after.h, gains) - controller_potential(xe, 0.0, gains);
    REQUIRE(drop <= -gains.delta_c);
    REQUIRE(switch_margin(xe, after, gains) < 0.0);
  }
  SECTION("identity error holds the switch") {
    REQUIRE(switch_update(RigidPose::identity(), ControllerState{0.0}, gains).h == 0.0);
  }
  SECTION("half turn about the switch axis escapes even with a scalar weight") {
    const RigidPose xe(Rotation::axis_angle(M_PI, Vector3d::UnitZ()), Vector3d::Zero());
    const ControllerState after = switch_update(xe, ControllerState{0.0}, gains);
    REQUIRE(after.h != 0.0);
    REQUIRE(controller_potential(xe, after.h, gains) <
            controller_potential(xe, 0.0, gains) - gains.delta_c);
  }
}

TEST_CASE("gravity hold at zero error and zero velocity") {
  const ArmParameters arm = default_arm();
  ArmParameters frictionless = arm;
  for (auto& l : frictionless.links) l.viscous = l.coulomb = 0.0;
  Vector6d q;
  q << 0.2, -0.9, 0.8, 0.3, 0.5, 0.1;
  const JointState js{q, Vector6d::Zero()};
  const TorqueCommand cmd = control_torque(frictionless, js, RigidPose::identity(),
                                           Twist::zero(), 0.0, paper_gains());
  REQUIRE((cmd.tau - gravity_torque(frictionless, q)).norm() < 1e-9);
}

TEST_CASE("feedback linearization is exact at the acceleration level") {
  const ArmParameters arm = default_arm();
  Sampler s(76);
  for (int trial = 0; trial < 30; ++trial) {
    Vector6d q;
    for (int i = 0; i < 6; ++i) q(i) = s.uniform(-1.0, 1.0);
    const JointState js{q, s.vec6()};
    const RigidPose xe = s.pose(0.3);
    const Twist y_err(s.vec3(0.2), s.vec3(0.2));
    const TorqueCommand cmd = control_torque(arm, js, xe, y_err, 0.0, paper_gains());
    if (cmd.singular) continue;
    const Vector6d qdd = forward_dynamics(arm, js, cmd.tau);
    const Vector6d zdot =
        jacobian(arm, q) * qdd + jacobian_dot(arm, q, js.qd) * js.qd;
    REQUIRE((zdot - cmd.twist_rate).norm() < 1e-9 * std::max(1.0, cmd.twist_rate.norm()));
  }
  // non-finite inputs rejected
  JointState bad;
  bad.q(2) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(
      control_torque(arm, bad, RigidPose::identity(), Twist::zero(), 0.0, paper_gains()),
      std::invalid_argument);
}

TEST_CASE("closed-loop dissipation on the twist-level model") {
  // double-integrator twist plant: X' = X W(Z), Z' = commanded rate; the
  // Lyapunov candidate U + 0.5 |pose_vee(Y)|^2 must dissipate at the closed
  // form rate -damping * |pose_vee(Y)|^2
  Sampler s(77);
  ControllerGains gains = paper_gains();
  gains.weight = Matrix4d(Eigen::Vector4d(220.0, 180.0, 240.0, 200.0).asDiagonal());
  const Twist wd(Vector3d::Zero(), Vector3d(0.05, 0.0, 0.0));
  RigidPose x(Rotation::axis_angle(0.4, Vector3d::UnitX()), Vector3d(0.2, -0.1, 0.3));
  RigidPose xd = RigidPose::identity();
  Vector6d z;
  z << 0.1, -0.2, 0.05, 0.0, 0.1, -0.05;
  const double h = 0.0;
  const double dt = 1e-4;
  const int steps = 3000;

  auto lyap = [&](const RigidPose& x_, const RigidPose& xd_, const Vector6d& z_) {
    const RigidPose xe = tracking_error(xd_, x_);
    const Twist y = velocity_error(xe, Twist(z_), wd);
    const Vector6d ybar = pose_vee(y.matrix());
    return std::make_pair(controller_potential(xe, h, gains) + 0.5 * ybar.squaredNorm(),
                          -gains.damping * ybar.squaredNorm());
  };

  std::vector<double> vs, cfs;
  for (int k = 0; k < steps; ++k) {
    auto rate = [&](const RigidPose& x_, const RigidPose& xd_, const Vector6d& z_) {
      const RigidPose xe = tracking_error(xd_, x_);
      const Twist y = velocity_error(xe, Twist(z_), wd);
      const Twist transported(Vector6d(z_ - y.vector()));
      const Vector6d u = twist_rate_command(xe, y, transported, h, gains);
      return std::make_tuple(Matrix4d(x_.homogeneous() * Twist(z_).matrix()),
                             Matrix4d(xd_.homogeneous() * wd.matrix()), Vector6d(-u));
    };
    // RK4 on the matrix representation
    Matrix4d xm = x.homogeneous(), xdm = xd.homogeneous();
    auto f = [&](const Matrix4d& a, const Matrix4d& b, const Vector6d& c) {
      return rate(RigidPose::from_homogeneous(a), RigidPose::from_homogeneous(b), c);
    };
    const auto k1 = f(xm, xdm, z);
    const auto k2 = f(xm + 0.5 * dt * std::get<0>(k1), xdm + 0.5 * dt * std::get<1>(k1),
                      Vector6d(z + 0.5 * dt * std::get<2>(k1)));
    const auto k3 = f(xm + 0.5 * dt * std::get<0>(k2), xdm + 0.5 * dt * std::get<1>(k2),
                      Vector6d(z + 0.5 * dt * std::get<2>(k2)));
    const auto k4 = f(xm + dt * std::get<0>(k3), xdm + dt * std::get<1>(k3),
                      Vector6d(z + dt * std::get<2>(k3)));
    xm += dt / 6.0 * (std::get<0>(k1) + 2 * std::get<0>(k2) + 2 * std::get<0>(k3) + std::get<0>(k4));
    xdm += dt / 6.0 * (std::get<1>(k1) + 2 * std::get<1>(k2) + 2 * std::get<1>(k3) + std::get<1>(k4));
    z += dt / 6.0 * (std::get<2>(k1) + 2 * std::get<2>(k2) + 2 * std::get<2>(k3) + std::get<2>(k4));
    x = RigidPose(Rotation::projected(xm.topLeftCorner<3, 3>()), Vector3d(xm.topRightCorner<3, 1>()));
    xd = RigidPose(Rotation::projected(xdm.topLeftCorner<3, 3>()), Vector3d(xdm.topRightCorner<3, 1>()));
    const auto [v, cf] = lyap(x, xd, z);
    vs.push_back(v);
    cfs.push_back(cf);
  }
  double worst = 0.0;
  for (size_t i = 2; i + 2 < vs.size(); ++i) {
    REQUIRE(vs[i + 1] <= vs[i] + 1e-9);
    const double vdot =
        (-vs[i + 2] + 8 * vs[i + 1] - 8 * vs[i - 1] + vs[i - 2]) / (12 * dt);
    worst = std::max(worst, std::abs(vdot - cfs[i]) / std::max(std::abs(cfs[i]), 1e-6));
  }
  REQUIRE(worst < 1e-4);
}
