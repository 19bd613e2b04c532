// slamarm - built-in property suites behind the `verify` CLI command
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_SELFCHECK_HPP
#define SLAMARM_SELFCHECK_HPP

#include <cstdio>
#include <random>
#include <string>

#include "slamarm/controller.hpp"
#include "slamarm/dynamics.hpp"
#include "slamarm/observer.hpp"
#include "slamarm/scenario.hpp"

namespace slamarm {

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  double worst = 0.0;

  bool ok() const { return failures == 0; }
};

namespace selfcheck_detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : rng_(seed) {}
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  Vector3d vec3(double s = 1.0) { return s * Vector3d(gauss(), gauss(), gauss()); }
  Vector3d unit3() {
    Vector3d v = vec3();
    while (v.norm() < 1e-6) v = vec3();
    return v.normalized();
  }
  Matrix3d rotation() { return rodrigues(uniform(0.0, M_PI), unit3()); }
  SlamElement slam(int n, double s = 1.5) {
    Matrix3Xd eta(3, n);
    for (int i = 0; i < n; ++i) eta.col(i) = vec3(s);
    return SlamElement(Rotation(rotation()), vec3(s), eta);
  }
  SlamTangent tangent(int n) {
    Matrix3Xd xi(3, n);
    for (int i = 0; i < n; ++i) xi.col(i) = vec3();
    return SlamTangent(vec3(), vec3(), xi);
  }
  MatrixXd dense(int r, int c) {
    return MatrixXd::NullaryExpr(r, c, [&](int, int) { return gauss(); });
  }

 private:
  std::mt19937_64 rng_;
};

inline void check(SuiteResult& res, double deviation, double tol) {
  res.checks += 1;
  res.worst = std::max(res.worst, deviation / tol);
  if (!(deviation <= tol)) res.failures += 1;
}

}  // namespace selfcheck_detail

/// Algebraic identity suite over the SLAM group: projection/transpose
/// interplay, trace pairings and cyclicity, the metric invariance of the
/// projection, and the matrix-derivative formula against finite differences.
inline SuiteResult verify_identities(int samples_per_n = 1000) {
  using selfcheck_detail::check;
  selfcheck_detail::Rng rng(1234);
  SuiteResult res{"identities"};
  for (int n : {1, 4, 8}) {
    const int d = n + 4;
    for (int s = 0; s < samples_per_n; ++s) {
      const MatrixXd x = rng.slam(n).embed();
      // (a) on the vanishing-lower-row class produced by the gradient calculus
      MatrixXd b = MatrixXd::Zero(d, d);
      b.topRows<3>() = rng.dense(3, d);
      check(res, (algebra_project(x * b) - algebra_project(x.inverse().transpose() * b))
                     .cwiseAbs()
                     .maxCoeff(),
            1e-10);
      // (b) tangent pairing ignores the projection
      const MatrixXd v = rng.tangent(n).embed();
      const MatrixXd bd = rng.dense(d, d);
      const double lhs = (v.transpose() * bd).trace();
      const double mid = (v.transpose() * algebra_project(bd)).trace();
      const double rhs = (algebra_project(bd).transpose() * v).trace();
      check(res, std::abs(lhs - mid), 1e-10 * std::max(1.0, std::abs(lhs)));
      check(res, std::abs(mid - rhs), 1e-10 * std::max(1.0, std::abs(mid)));
      // (c) trace cyclicity on conformable quadruples
      const MatrixXd A = rng.dense(d, d), B = rng.dense(d, d), C = rng.dense(d, d),
                     D = rng.dense(d, d);
      const double t1 = (A * B * C * D).trace();
      const double t2 = (C * D * A * B).trace();
      const double t3 = (D * A * B * C).trace();
      check(res, std::abs(t1 - t2), 1e-10 * std::max(1.0, std::abs(t1)));
      check(res, std::abs(t1 - t3), 1e-10 * std::max(1.0, std::abs(t1)));
      // (d) group elements are invisible inside the projected Gram trace
      const MatrixXd ub = algebra_project(bd);
      check(res,
            std::abs((x.transpose() * x * ub * ub.transpose()).trace() -
                     (ub * ub.transpose()).trace()),
            1e-10 * std::max(1.0, (ub * ub.transpose()).trace()));
      // (e) derivative of tr(A X B X^T C); the formula is the transpose layout
      if (s < samples_per_n / 10) {
        const MatrixXd grad =
            A.transpose() * C.transpose() * x * B.transpose() + C * A * x * B;
        const double h = 1e-6;
        double worst = 0.0;
        for (int i = 0; i < d; ++i) {
          for (int jcol = 0; jcol < d; ++jcol) {
            MatrixXd xp = x, xm = x;
            xp(i, jcol) += h;
            xm(i, jcol) -= h;
            const double fd =
                ((A * xp * B * xp.transpose() * C).trace() -
                 (A * xm * B * xm.transpose() * C).trace()) /
                (2 * h);
            worst = std::max(worst, std::abs(fd - grad(i, jcol)) /
                                        std::max(1.0, std::abs(fd)));
          }
        }
        check(res, worst, 1e-4);
      }
    }
  }
  // rodrigues periodicity rides along with the identity suite
  for (int s = 0; s < 200; ++s) {
    const double theta = rng.uniform(-M_PI, M_PI);
    const Vector3d axis = rng.unit3();
    check(res, (rodrigues(theta + 2 * M_PI, axis) - rodrigues(theta, axis)).cwiseAbs().maxCoeff(),
          1e-10);
  }
  return res;
}

/// Gradient suite: both potentials against central finite differences along
/// random tangent directions.
inline SuiteResult verify_gradients(int samples = 500) {
  using selfcheck_detail::check;
  selfcheck_detail::Rng rng(2345);
  SuiteResult res{"gradients"};

  LandmarkMap map = default_map();
  ObserverGains og;
  og.k = VectorXd::Constant(map.total(), 0.05);
  const SensorModel model(map, og);
  const int n = map.mapped_count();

  ControllerGains cg;
  cg.weight = Matrix4d(Eigen::Vector4d(260.0, 200.0, 140.0, 220.0).asDiagonal());

  int done = 0;
  while (done < samples) {
    // observer potential on the SLAM group
    {
      const SlamElement x = rng.slam(n);
      const SlamTangent v = rng.tangent(n);
      const double h = 1e-6;
      auto u_at = [&](double t) {
        SlamTangent tv(Vector3d(t * v.omega), Vector3d(t * v.vel), Matrix3Xd(t * v.xi));
        return potential_from_error(x * slam_exp(tv), model.weight_matrix());
      };
      const double fd = (u_at(h) - u_at(-h)) / (2 * h);
      const double ip =
          (innovation_from_error(x, model.weight_matrix()).transpose() * v.embed()).trace();
      if (std::abs(fd) > 1e-6) {
        check(res, std::abs(ip - fd), 1e-4 * std::abs(fd));
      } else {
        continue;
      }
    }
    // pose potential on SE(3), random switch angle
    {
      const RigidPose xe(Rotation(rng.rotation()), rng.vec3());
      const double hs = rng.uniform(-M_PI / 2, M_PI / 2);
      const Twist v(rng.vec3(), rng.vec3());
      const double h = 1e-6;
      auto u_at = [&](double t) {
        return controller_potential(RigidPose(xe * se3_exp(v, t)), hs, cg);
      };
      const double fd = (u_at(h) - u_at(-h)) / (2 * h);
      const double ip = (gradient_matrix(xe, hs, cg).transpose() * v.matrix()).trace();
      if (std::abs(fd) > 1e-6) {
        check(res, std::abs(ip - fd), 1e-4 * std::abs(fd));
        ++done;
      }
    }
  }
  return res;
}

/// Sensor-only equivalence: the measurement-domain potential and innovation
/// equal their true-error-domain forms on random state pairs.
inline SuiteResult verify_equivalence(int samples = 500) {
  using selfcheck_detail::check;
  selfcheck_detail::Rng rng(3456);
  SuiteResult res{"equivalence"};
  LandmarkMap map = default_map();
  ObserverGains og;
  og.k = VectorXd::Constant(map.total(), 0.05);
  const SensorModel model(map, og);
  const int n = map.mapped_count();
  Matrix3Xd eta(3, n);
  for (int i = 0; i < n; ++i) eta.col(i) = map.mapped[i];

  for (int s = 0; s < samples; ++s) {
    const SlamElement truth(Rotation(rng.rotation()), rng.vec3(0.5), eta);
    const SlamElement xhat = rng.slam(n, 2.0);
    const CameraMeasurement m = measure(truth, map);
    const SlamElement err = estimation_error(truth, {xhat, 0});
    check(res,
          std::abs(potential(m, xhat, model) - potential_from_error(err, model.weight_matrix())),
          1e-10);
    check(res,
          (innovation(m, xhat, model) - innovation_from_error(err, model.weight_matrix()))
              .cwiseAbs()
              .maxCoeff(),
          1e-10);
  }
  return res;
}

/// Dynamics-structure suite: Jacobian finite differences, Christoffel
/// antisymmetry and friction dissipativity on random joint states.
inline SuiteResult verify_dynamics(int samples = 60) {
  using selfcheck_detail::check;
  selfcheck_detail::Rng rng(4567);
  SuiteResult res{"dynamics"};
  const ArmParameters arm = default_arm();
  const double h = 1e-6;
  for (int s = 0; s < samples; ++s) {
    Vector6d q, qd;
    for (int i = 0; i < 6; ++i) {
      q(i) = rng.uniform(-1.2, 1.2);
      qd(i) = rng.gauss();
    }
    const Matrix6d j = jacobian(arm, q);
    for (int k = 0; k < 6; ++k) {
      Vector6d qp = q, qm = q;
      qp(k) += h;
      qm(k) -= h;
      const RigidPose d = forward_kinematics(arm, qm).inverse() * forward_kinematics(arm, qp);
      const Twist fd = se3_log(d);
      check(res, (j.col(k).head<3>() - fd.omega / (2 * h)).norm(), 1e-5);
      check(res, (j.col(k).tail<3>() - fd.vel / (2 * h)).norm(), 1e-5);
    }
    const auto dm = mass_matrix_partials(arm, q);
    Matrix6d mdot = Matrix6d::Zero();
    for (int k = 0; k < 6; ++k) mdot += dm[k] * qd(k);
    const Matrix6d skew = mdot - 2.0 * coriolis(arm, q, qd);
    check(res, (skew + skew.transpose()).cwiseAbs().maxCoeff(), 1e-8);
    check(res, std::max(0.0, -qd.dot(friction_torque(arm, qd))), 1e-15);
  }
  return res;
}

inline void print_suite(const SuiteResult& res) {
  std::printf("[%s] %s: %d/%d checks passed (worst deviation %.3g of tolerance)\n",
              res.ok() ? "pass" : "FAIL", res.name.c_str(), res.checks - res.failures,
              res.checks, res.worst);
}

}  // namespace slamarm

#endif  // SLAMARM_SELFCHECK_HPP
