// slamarm - matrix Lie groups SO(3), SE(3), SLAM_n(3) and their maps
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_LIE_HPP
#define SLAMARM_LIE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace slamarm {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix3Xd = Eigen::Matrix<double, 3, Eigen::Dynamic>;

// Tolerances used by the group-membership and identity checks.
inline constexpr double kOrthonormalTol = 1e-9;
inline constexpr double kAlgebraTol = 1e-10;

/// Skew-symmetric matrix of a 3-vector: hat(y) * z = y x z.
inline Matrix3d hat(const Vector3d& y) {
  Matrix3d s;
  // clang-format off
  s <<    0.0, -y.z(),  y.y(),
        y.z(),    0.0, -y.x(),
       -y.y(),  y.x(),    0.0;
  // clang-format on
  return s;
}

/// Extracts the vector of the skew part of a 3x3 matrix; inverse of hat on
/// skew input, and vee(A) = vee((A - A^T)/2) for arbitrary A.
inline Vector3d vee(const Matrix3d& a) {
  return 0.5 * Vector3d(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

inline Matrix3d skew_part(const Matrix3d& a) { return 0.5 * (a - a.transpose()); }

/// Vectorizes a 4x4 tangent-shaped matrix [[A, y],[c, d]] as [vee(A); y/2].
inline Vector6d pose_vee(const Matrix4d& m) {
  Vector6d out;
  out.head<3>() = vee(m.topLeftCorner<3, 3>());
  out.tail<3>() = 0.5 * m.topRightCorner<3, 1>();
  return out;
}

/// Projects a 4x4 matrix onto the se(3) shape: [[skew(A), y],[0, 0]].
inline Matrix4d pose_project(const Matrix4d& m) {
  Matrix4d out = Matrix4d::Zero();
  out.topLeftCorner<3, 3>() = skew_part(m.topLeftCorner<3, 3>());
  out.topRightCorner<3, 1>() = m.topRightCorner<3, 1>();
  return out;
}

/// Projects an (n+4)x(n+4) matrix onto the slam_n(3) shape: the upper-left
/// 3x3 block is replaced by its skew part, the upper-right 3x(n+1) block is
/// retained, the lower n+1 rows are zeroed.
inline MatrixXd algebra_project(const MatrixXd& b) {
  if (b.rows() != b.cols() || b.rows() < 4) {
    throw std::invalid_argument("algebra_project: need square matrix of size >= 4");
  }
  MatrixXd out = MatrixXd::Zero(b.rows(), b.cols());
  out.topLeftCorner<3, 3>() = skew_part(b.topLeftCorner<3, 3>());
  out.block(0, 3, 3, b.cols() - 3) = b.block(0, 3, 3, b.cols() - 3);
  return out;
}

/// Rotation about a unit axis by an angle, I + sin(t)*hat(y) + (1-cos(t))*hat(y)^2.
inline Matrix3d rodrigues(double theta, const Vector3d& axis) {
  if (std::abs(axis.norm() - 1.0) > kOrthonormalTol) {
    throw std::invalid_argument("rodrigues: axis must be a unit vector");
  }
  const Matrix3d g = hat(axis);
  return Matrix3d::Identity() + std::sin(theta) * g + (1.0 - std::cos(theta)) * (g * g);
}

/// so(3) exponential, series-stable near zero.
inline Matrix3d so3_exp(const Vector3d& w) {
  const double theta = w.norm();
  if (theta < 1e-12) {
    const Matrix3d g = hat(w);
    return Matrix3d::Identity() + g + 0.5 * g * g;
  }
  return rodrigues(theta, Vector3d(w / theta));
}

/// so(3) logarithm via the quaternion form, well conditioned at 0 and pi.
inline Vector3d so3_log(const Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  const Vector3d v = q.vec();
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * (q.w() < 0.0 ? -v : v);
  const double theta = 2.0 * std::atan2(vn, std::abs(q.w()));
  const Vector3d axis = (q.w() < 0.0 ? -v : v) / vn;
  return theta * axis;
}

/// Nearest rotation in Frobenius norm (polar factor), det +1 enforced.
inline Matrix3d project_to_so3(const Matrix3d& m) {
  Eigen::JacobiSVD<Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

/// Left Jacobian of SO(3); maps algebra translations through the exponential.
inline Matrix3d so3_left_jacobian(const Vector3d& w) {
  const double theta = w.norm();
  const Matrix3d g = hat(w);
  if (theta < 1e-6) {
    return Matrix3d::Identity() + 0.5 * g + (1.0 / 6.0) * g * g;
  }
  const double t2 = theta * theta;
  return Matrix3d::Identity() + (1.0 - std::cos(theta)) / t2 * g +
         (theta - std::sin(theta)) / (t2 * theta) * g * g;
}

inline Matrix3d so3_left_jacobian_inv(const Vector3d& w) {
  const double theta = w.norm();
  const Matrix3d g = hat(w);
  if (theta < 1e-6) {
    return Matrix3d::Identity() - 0.5 * g + (1.0 / 12.0) * g * g;
  }
  const double c = 1.0 / (theta * theta) -
                   (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Matrix3d::Identity() - 0.5 * g + c * g * g;
}

// ---------------------------------------------------------------------------
// Group value types
// ---------------------------------------------------------------------------

/// Element of SO(3). Stores the matrix; `projected` reorthonormalizes.
class Rotation {
 public:
  Rotation() : m_(Matrix3d::Identity()) {}
  explicit Rotation(const Matrix3d& m) : m_(m) {}

  static Rotation identity() { return Rotation(); }
  static Rotation projected(const Matrix3d& m) { return Rotation(project_to_so3(m)); }
  static Rotation axis_angle(double theta, const Vector3d& axis) {
    return Rotation(rodrigues(theta, axis));
  }

  const Matrix3d& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vector3d operator*(const Vector3d& v) const { return m_ * v; }

  double orthonormality_defect() const {
    return std::max((m_.transpose() * m_ - Matrix3d::Identity()).cwiseAbs().maxCoeff(),
                    std::abs(m_.determinant() - 1.0));
  }
  bool is_valid(double tol = kOrthonormalTol) const { return orthonormality_defect() <= tol; }

 private:
  Matrix3d m_;
};

/// Element of SE(3): attitude + position, homogeneous last row (0,0,0,1).
struct RigidPose {
  Rotation rot;
  Vector3d pos = Vector3d::Zero();

  RigidPose() = default;
  RigidPose(const Rotation& r, const Vector3d& p) : rot(r), pos(p) {}

  static RigidPose identity() { return {}; }
  static RigidPose from_homogeneous(const Matrix4d& m) {
    return {Rotation(Matrix3d(m.topLeftCorner<3, 3>())), Vector3d(m.topRightCorner<3, 1>())};
  }

  Matrix4d homogeneous() const {
    Matrix4d m = Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rot.matrix();
    m.topRightCorner<3, 1>() = pos;
    return m;
  }
  RigidPose inverse() const {
    return {rot.inverse(), Vector3d(-(rot.matrix().transpose() * pos))};
  }
  RigidPose operator*(const RigidPose& o) const {
    return {rot * o.rot, Vector3d(rot.matrix() * o.pos + pos)};
  }
};

/// Body twist (omega, v); matrix form has hat(omega) upper-left, zero last row.
struct Twist {
  Vector3d omega = Vector3d::Zero();
  Vector3d vel = Vector3d::Zero();

  Twist() = default;
  Twist(const Vector3d& w, const Vector3d& v) : omega(w), vel(v) {}
  explicit Twist(const Vector6d& z) : omega(z.head<3>()), vel(z.tail<3>()) {}

  static Twist zero() { return {}; }

  Vector6d vector() const {
    Vector6d z;
    z << omega, vel;
    return z;
  }
  Matrix4d matrix() const {
    Matrix4d m = Matrix4d::Zero();
    m.topLeftCorner<3, 3>() = hat(omega);
    m.topRightCorner<3, 1>() = vel;
    return m;
  }
};

/// Twist transport between frames related by a pose: [[R, 0],[hat(p)R, R]].
inline Matrix6d adjoint(const RigidPose& x) {
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = x.rot.matrix();
  m.bottomRightCorner<3, 3>() = x.rot.matrix();
  m.bottomLeftCorner<3, 3>() = hat(x.pos) * x.rot.matrix();
  return m;
}

/// se(3) bracket on [omega; v] twist vectors.
inline Vector6d se3_bracket(const Vector6d& a, const Vector6d& b) {
  Vector6d out;
  out.head<3>() = a.head<3>().cross(b.head<3>());
  out.tail<3>() = a.head<3>().cross(b.tail<3>()) - b.head<3>().cross(a.tail<3>());
  return out;
}

/// Matrix of ad_a so that ad6(a) * b = se3_bracket(a, b).
inline Matrix6d ad6(const Vector6d& a) {
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = hat(a.head<3>());
  m.bottomRightCorner<3, 3>() = hat(a.head<3>());
  m.bottomLeftCorner<3, 3>() = hat(a.tail<3>());
  return m;
}

/// SE(3) exponential of a twist scaled by dt.
inline RigidPose se3_exp(const Twist& xi, double dt = 1.0) {
  const Vector3d w = dt * xi.omega;
  const Vector3d v = dt * xi.vel;
  return {Rotation(so3_exp(w)), Vector3d(so3_left_jacobian(w) * v)};
}

/// SE(3) logarithm as a body twist.
inline Twist se3_log(const RigidPose& x) {
  const Vector3d w = so3_log(x.rot.matrix());
  return {w, Vector3d(so3_left_jacobian_inv(w) * x.pos)};
}

// ---------------------------------------------------------------------------
// SLAM_n(3)
// ---------------------------------------------------------------------------

/// Element of SLAM_n(3): attitude, position and an n-column landmark block.
struct SlamElement {
  Rotation rot;
  Vector3d pos = Vector3d::Zero();
  Matrix3Xd landmarks;  // 3 x n

  SlamElement() : landmarks(3, 0) {}
  SlamElement(const Rotation& r, const Vector3d& p, const Matrix3Xd& eta)
      : rot(r), pos(p), landmarks(eta) {}

  static SlamElement identity(int n) {
    return {Rotation::identity(), Vector3d::Zero(), Matrix3Xd::Zero(3, n)};
  }

  int landmark_count() const { return static_cast<int>(landmarks.cols()); }
  int dim() const { return landmark_count() + 4; }

  /// (n+4)x(n+4) homogeneous embedding with identity lower-right block.
  MatrixXd embed() const {
    const int n = landmark_count();
    MatrixXd m = MatrixXd::Identity(n + 4, n + 4);
    m.topLeftCorner<3, 3>() = rot.matrix();
    m.block(0, 3, 3, 1) = pos;
    m.block(0, 4, 3, n) = landmarks;
    return m;
  }

  SlamElement inverse() const {
    const Matrix3d rt = rot.matrix().transpose();
    return {Rotation(rt), Vector3d(-(rt * pos)), Matrix3Xd(-(rt * landmarks))};
  }

  SlamElement operator*(const SlamElement& o) const {
    if (o.landmark_count() != landmark_count()) {
      throw std::invalid_argument("SlamElement: landmark count mismatch");
    }
    return {rot * o.rot, Vector3d(rot.matrix() * o.pos + pos),
            Matrix3Xd(rot.matrix() * o.landmarks + landmarks)};
  }

  double defect_from_identity() const {
    return std::sqrt((rot.matrix() - Matrix3d::Identity()).squaredNorm() +
                     pos.squaredNorm() + landmarks.squaredNorm());
  }
};

/// Element of slam_n(3): angular rate, linear velocity, landmark velocities.
struct SlamTangent {
  Vector3d omega = Vector3d::Zero();
  Vector3d vel = Vector3d::Zero();
  Matrix3Xd xi;  // 3 x n

  SlamTangent() : xi(3, 0) {}
  SlamTangent(const Vector3d& w, const Vector3d& v, const Matrix3Xd& x)
      : omega(w), vel(v), xi(x) {}

  static SlamTangent zero(int n) {
    return {Vector3d::Zero(), Vector3d::Zero(), Matrix3Xd::Zero(3, n)};
  }
  static SlamTangent from_twist(const Twist& t, int n) {
    return {t.omega, t.vel, Matrix3Xd::Zero(3, n)};
  }

  int landmark_count() const { return static_cast<int>(xi.cols()); }

  /// (n+4)x(n+4) embedding with zero lower n+1 rows.
  MatrixXd embed() const {
    const int n = landmark_count();
    MatrixXd m = MatrixXd::Zero(n + 4, n + 4);
    m.topLeftCorner<3, 3>() = hat(omega);
    m.block(0, 3, 3, 1) = vel;
    m.block(0, 4, 3, n) = xi;
    return m;
  }

  /// Reads back an algebra-shaped matrix (upper-left block must be skew).
  static SlamTangent from_embed(const MatrixXd& m) {
    const int n = static_cast<int>(m.cols()) - 4;
    return {vee(Matrix3d(m.topLeftCorner<3, 3>())), Vector3d(m.block(0, 3, 3, 1)),
            Matrix3Xd(m.block(0, 4, 3, n))};
  }
};

/// Adjoint action on the algebra, realized as conjugation followed by the
/// algebra projection (a no-op when the argument is already algebra shaped):
/// X V X^{-1} = [[R S R^T, R U - hat(R w) W],[0, 0]] for X = [[R, W],[0, I]].
inline SlamTangent slam_adjoint(const SlamElement& x, const SlamTangent& v) {
  if (v.landmark_count() != x.landmark_count()) {
    throw std::invalid_argument("slam_adjoint: landmark count mismatch");
  }
  const Matrix3d r = x.rot.matrix();
  const Vector3d w_new = r * v.omega;
  const Matrix3d h = hat(w_new);
  return {w_new, Vector3d(r * v.vel - h * x.pos), Matrix3Xd(r * v.xi - h * x.landmarks)};
}

/// SLAM_n(3) exponential: rotation by Rodrigues, columns through the left Jacobian.
inline SlamElement slam_exp(const SlamTangent& t) {
  const Matrix3d r = so3_exp(t.omega);
  const Matrix3d jl = so3_left_jacobian(t.omega);
  return {Rotation(r), Vector3d(jl * t.vel), Matrix3Xd(jl * t.xi)};
}

}  // namespace slamarm

#endif  // SLAMARM_LIE_HPP
