// slamarm - unit and property tests for the Lie-group core
// SPDX-License-Identifier: MIT

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "slamarm/lie.hpp"

using namespace slamarm;
using slamarm::testing::exp_series;
using slamarm::testing::Sampler;

TEST_CASE("hat produces the cross-product matrix") {
  const Vector3d e1 = Vector3d::UnitX(), e2 = Vector3d::UnitY(), e3 = Vector3d::UnitZ();
  REQUIRE((hat(e1) * e2 - e3).norm() == 0.0);
  REQUIRE(hat(Vector3d::Zero()).norm() == 0.0);
  Sampler s(11);
  for (int i = 0; i < 100; ++i) {
    const Vector3d y = s.vec3(), z = s.vec3();
    REQUIRE((hat(y) + hat(y).transpose()).norm() == 0.0);
    REQUIRE((hat(y) * z - y.cross(z)).norm() < 1e-15);
    REQUIRE((vee(hat(y)) - y).norm() == 0.0);
  }
}

TEST_CASE("vee extracts the skew part") {
  REQUIRE((vee(hat(Vector3d(1, 2, 3))) - Vector3d(1, 2, 3)).norm() == 0.0);
  Sampler s(12);
  for (int i = 0; i < 100; ++i) {
    const Matrix3d a = Matrix3d::NullaryExpr([&](int, int) { return s.gauss(); });
    const Matrix3d sym = 0.5 * (a + a.transpose());
    REQUIRE(vee(sym).norm() == 0.0);
    REQUIRE((vee(a) - vee(skew_part(a))).norm() == 0.0);
  }
}

TEST_CASE("pose_vee halves the translation entry") {
  REQUIRE(pose_vee(Matrix4d::Identity()).norm() == 0.0);
  Sampler s(13);
  for (int i = 0; i < 50; ++i) {
    const Vector3d w = s.vec3(), v = s.vec3();
    const Vector6d out = pose_vee(Twist(w, v).matrix());
    REQUIRE((out.head<3>() - w).norm() == 0.0);
    REQUIRE((out.tail<3>() - 0.5 * v).norm() == 0.0);
  }
}

TEST_CASE("pose_project keeps the skew part and the translation column") {
  REQUIRE(pose_project(Matrix4d::Identity()).norm() == 0.0);
  Sampler s(14);
  for (int i = 0; i < 50; ++i) {
    Matrix4d m = Matrix4d::NullaryExpr([&](int, int) { return s.gauss(); });
    // symmetric upper-left block: only the translation column survives
    Matrix4d msym = m;
    msym.topLeftCorner<3, 3>() =
        0.5 * (m.topLeftCorner<3, 3>() + m.topLeftCorner<3, 3>().transpose());
    const Matrix4d p = pose_project(msym);
    REQUIRE(p.topLeftCorner<3, 3>().norm() < 1e-15);
    REQUIRE((p.topRightCorner<3, 1>() - msym.topRightCorner<3, 1>()).norm() == 0.0);
    REQUIRE(p.bottomRows<1>().norm() == 0.0);
    // both discard the symmetric part
    REQUIRE((pose_vee(pose_project(m)) - pose_vee(m)).norm() == 0.0);
  }
}

TEST_CASE("rodrigues formula") {
  REQUIRE((rodrigues(0.0, Vector3d::UnitZ()) - Matrix3d::Identity()).norm() == 0.0);
  Matrix3d quarter;
  quarter << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  REQUIRE((rodrigues(M_PI / 2, Vector3d::UnitZ()) - quarter).norm() < 1e-15);
  REQUIRE_THROWS_AS(rodrigues(1.0, Vector3d(1, 1, 0)), std::invalid_argument);

  Sampler s(15);
  for (int i = 0; i < 100; ++i) {
    const double theta = s.uniform(-2 * M_PI, 2 * M_PI);
    const Vector3d axis = s.unit3();
    const Matrix3d r = rodrigues(theta, axis);
    const MatrixXd oracle = exp_series(theta * hat(axis));
    REQUIRE((r - oracle).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((rodrigues(theta + 2 * M_PI, axis) - r).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("so3 log round-trips including near pi") {
  Sampler s(16);
  for (int i = 0; i < 200; ++i) {
    const double theta = (i % 4 == 0) ? s.uniform(M_PI - 1e-7, M_PI) : s.uniform(0.0, M_PI - 0.1);
    const Vector3d axis = s.unit3();
    const Matrix3d r = rodrigues(theta, axis);
    const Vector3d w = so3_log(r);
    REQUIRE((so3_exp(w) - r).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("algebra_project zero and paper-form identities") {
  const int n = 4;
  REQUIRE(algebra_project(MatrixXd::Identity(n + 4, n + 4)).norm() == 0.0);

  Sampler s(17);
  SECTION("projection is invisible to the tangent pairing") {
    for (int i = 0; i < 200; ++i) {
      const MatrixXd b = MatrixXd::NullaryExpr(n + 4, n + 4, [&](int, int) { return s.gauss(); });
      const MatrixXd v = s.slam_tangent(n).embed();
      const double lhs = (v.transpose() * b).trace();
      const double mid = (v.transpose() * algebra_project(b)).trace();
      const double rhs = (algebra_project(b).transpose() * v).trace();
      REQUIRE(std::abs(lhs - mid) < 1e-10);
      REQUIRE(std::abs(mid - rhs) < 1e-10);
    }
  }
  SECTION("group element vs inverse-transpose under projection") {
    // holds on the subspace with vanishing lower rows, the form the gradient
    // calculus produces
    for (int i = 0; i < 200; ++i) {
      const MatrixXd x = s.slam(n).embed();
      MatrixXd b = MatrixXd::Zero(n + 4, n + 4);
      b.topRows<3>() = MatrixXd::NullaryExpr(3, n + 4, [&](int, int) { return s.gauss(); });
      const MatrixXd lhs = algebra_project(x * b);
      const MatrixXd rhs = algebra_project(x.inverse().transpose() * b);
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("adjoint of SE(3)") {
  REQUIRE((adjoint(RigidPose::identity()) - Matrix6d::Identity()).norm() == 0.0);
  Sampler s(18);
  for (int i = 0; i < 100; ++i) {
    const RigidPose a = s.pose(), b = s.pose();
    REQUIRE((adjoint(a * b) - adjoint(a) * adjoint(b)).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((adjoint(a.inverse()) - adjoint(a).inverse()).cwiseAbs().maxCoeff() < 1e-10);
    // matrix conjugation route
    const Twist w = s.twist();
    const Matrix4d conj = a.homogeneous() * w.matrix() * a.inverse().homogeneous();
    const Vector6d via_adjoint = adjoint(a) * w.vector();
    REQUIRE((pose_vee(pose_project(conj)) - pose_vee(Twist(Vector6d(via_adjoint)).matrix()))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
}

TEST_CASE("slam compose and inverse") {
  const SlamElement id = SlamElement::identity(3);
  REQUIRE(id.inverse().defect_from_identity() == 0.0);

  Sampler s(19);
  for (int i = 0; i < 100; ++i) {
    const SlamElement a = s.slam(4), b = s.slam(4), c = s.slam(4);
    // inverse block formulas against the embedding
    const Matrix3d rt = a.rot.matrix().transpose();
    const SlamElement ainv = a.inverse();
    REQUIRE((ainv.rot.matrix() - rt).norm() < 1e-15);
    REQUIRE((ainv.pos + rt * a.pos).norm() < 1e-15);
    REQUIRE((ainv.landmarks + rt * a.landmarks).norm() < 1e-15);
    REQUIRE(((a * ainv).embed() - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    // associativity against the raw matrix product
    const MatrixXd lhs = ((a * b) * c).embed();
    const MatrixXd rhs = (a.embed() * b.embed()) * c.embed();
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }

  SlamElement m3 = s.slam(3);
  SlamElement m4 = s.slam(4);
  REQUIRE_THROWS_AS(m3 * m4, std::invalid_argument);
}

TEST_CASE("slam adjoint equals conjugation followed by projection") {
  Sampler s(20);
  for (int i = 0; i < 100; ++i) {
    const SlamElement x = s.slam(5);
    const SlamTangent v = s.slam_tangent(5);
    const MatrixXd direct = slam_adjoint(x, v).embed();
    const MatrixXd conj = algebra_project(x.embed() * v.embed() * x.inverse().embed());
    REQUIRE((direct - conj).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("group exponentials match the series oracle") {
  Sampler s(21);
  for (int i = 0; i < 100; ++i) {
    const SlamTangent v = s.slam_tangent(3);
    REQUIRE((slam_exp(v).embed() - exp_series(v.embed())).cwiseAbs().maxCoeff() < 1e-10);
    const Twist w = s.twist();
    REQUIRE((se3_exp(w).homogeneous() - exp_series(w.matrix())).cwiseAbs().maxCoeff() < 1e-10);
    // log round-trip
    const RigidPose x = s.pose();
    const RigidPose back = se3_exp(se3_log(x));
    REQUIRE((back.homogeneous() - x.homogeneous()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("group closure with reprojection") {
  Sampler s(22);
  for (int i = 0; i < 100; ++i) {
    SlamElement a = s.slam(4);
    SlamElement b = s.slam(4);
    SlamElement prod = a * b;
    prod.rot = Rotation::projected(prod.rot.matrix());
    REQUIRE(prod.rot.is_valid());
    REQUIRE(prod.inverse().rot.is_valid());
    // perturbed rotation recovers membership after projection
    Matrix3d noisy = a.rot.matrix() + 1e-6 * Matrix3d::NullaryExpr([&](int, int) { return s.gauss(); });
    REQUIRE(Rotation::projected(noisy).is_valid());
  }
}
