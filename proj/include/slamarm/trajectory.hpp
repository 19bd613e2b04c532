// slamarm - piecewise-constant-twist reference trajectories
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_TRAJECTORY_HPP
#define SLAMARM_TRAJECTORY_HPP

#include <stdexcept>
#include <vector>

#include "slamarm/controller.hpp"
#include "slamarm/lie.hpp"

namespace slamarm {

/// One reference segment: start pose, constant body twist, duration.
struct ReferenceSegment {
  RigidPose start;
  Twist twist;
  double duration = 0.0;
};

struct SquareSpec {
  Vector3d center = Vector3d(0.9, 0.0, 0.7);
  Matrix3d attitude = Matrix3d::Identity();  // constant desired attitude
  Vector3d normal = Vector3d::UnitZ();       // square plane normal
  double side = 0.5;                         // m
  double speed = 0.05;                       // m/s
  double lead_in = 5.0;                      // hold at the first corner, s
};

struct TrajectorySpec {
  enum class Kind { hold, square, segments };
  Kind kind = Kind::square;
  RigidPose hold_pose;         // for Kind::hold
  double hold_duration = 10.0;
  SquareSpec square;
  std::vector<ReferenceSegment> segments;  // for Kind::segments
};

/// Expands a square spec into an optional lead-in hold plus 4 edges of
/// constant linear velocity and zero angular velocity; the path closes.
inline std::vector<ReferenceSegment> generate_square(const SquareSpec& spec) {
  if (spec.side <= 0.0) throw std::invalid_argument("generate_square: side must be positive");
  if (spec.speed <= 0.0) throw std::invalid_argument("generate_square: speed must be positive");
  // in-plane orthonormal directions
  const Vector3d n = spec.normal.normalized();
  Vector3d u = n.cross(Vector3d::UnitX());
  if (u.norm() < 1e-6) u = n.cross(Vector3d::UnitY());
  u.normalize();
  const Vector3d w = n.cross(u);

  const Rotation att(spec.attitude);
  const double hs = 0.5 * spec.side;
  const std::array<Vector3d, 4> corners = {
      Vector3d(spec.center - hs * u - hs * w), Vector3d(spec.center + hs * u - hs * w),
      Vector3d(spec.center + hs * u + hs * w), Vector3d(spec.center - hs * u + hs * w)};

  std::vector<ReferenceSegment> segs;
  if (spec.lead_in > 0.0) {
    segs.push_back({RigidPose(att, corners[0]), Twist::zero(), spec.lead_in});
  }
  const double edge_time = spec.side / spec.speed;
  for (int e = 0; e < 4; ++e) {
    const Vector3d from = corners[e];
    const Vector3d to = corners[(e + 1) % 4];
    const Vector3d v_world = (to - from).normalized() * spec.speed;
    // body twist of the reference frame: constant attitude, so v = R^T v_world
    const Twist tw(Vector3d::Zero(), Vector3d(att.matrix().transpose() * v_world));
    segs.push_back({RigidPose(att, from), tw, edge_time});
  }
  return segs;
}

inline std::vector<ReferenceSegment> expand_trajectory(const TrajectorySpec& spec) {
  switch (spec.kind) {
    case TrajectorySpec::Kind::hold:
      return {{spec.hold_pose, Twist::zero(), spec.hold_duration}};
    case TrajectorySpec::Kind::square:
      return generate_square(spec.square);
    case TrajectorySpec::Kind::segments:
      if (spec.segments.empty()) {
        throw std::invalid_argument("expand_trajectory: empty segment list");
      }
      return spec.segments;
  }
  throw std::logic_error("expand_trajectory: unknown kind");
}

/// Piecewise reference sampler; poses propagate in closed form within a
/// segment, X_d(t) = X_start exp((t - t_start) W_d).
class ReferenceSampler {
 public:
  explicit ReferenceSampler(std::vector<ReferenceSegment> segs) : segs_(std::move(segs)) {
    double t = 0.0;
    for (const auto& s : segs_) {
      starts_.push_back(t);
      t += s.duration;
    }
    total_ = t;
  }

  double total_duration() const { return total_; }
  int segment_count() const { return static_cast<int>(segs_.size()); }

  int segment_index(double t) const {
    if (t <= 0.0) return 0;
    for (int i = segment_count() - 1; i >= 0; --i) {
      if (t >= starts_[i] - 1e-15) return i;
    }
    return 0;
  }

  double segment_start(int i) const { return starts_[i]; }

  DesiredMotion sample(double t) const {
    const int i = segment_index(t);
    const auto& s = segs_[i];
    const double local = std::min(std::max(t - starts_[i], 0.0), s.duration);
    // past the end of the last segment: hold the final pose
    if (i == segment_count() - 1 && t - starts_[i] >= s.duration) {
      return {s.start * se3_exp(s.twist, s.duration), Twist::zero()};
    }
    return {s.start * se3_exp(s.twist, local), s.twist};
  }

 private:
  std::vector<ReferenceSegment> segs_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

}  // namespace slamarm

#endif  // SLAMARM_TRAJECTORY_HPP
