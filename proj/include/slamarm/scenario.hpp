// slamarm - scenario schema: config keys <-> SimulationConfig, default arm
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_SCENARIO_HPP
#define SLAMARM_SCENARIO_HPP

#include <string>

#include "slamarm/config.hpp"
#include "slamarm/hybrid_sim.hpp"

namespace slamarm {

/// Documented default arm: anthropomorphic shoulder/elbow plus spherical
/// wrist, link lengths summing to about 2 m. Inertias are solid-box values.
inline ArmParameters default_arm() {
  auto box = [](double m, double sx, double sy, double sz) {
    return Matrix3d(
        (m / 12.0) *
        Vector3d(sy * sy + sz * sz, sx * sx + sz * sz, sx * sx + sy * sy).asDiagonal());
  };
  ArmParameters arm;
  auto& l = arm.links;
  // a, alpha, d, theta_offset
  l[0] = {0.15, -M_PI / 2, 0.40, 0.0,      25.0, Vector3d(0.07, 0.0, -0.10), box(25.0, 0.20, 0.20, 0.45), 2.0, 1.5};
  l[1] = {0.80, 0.0,       0.0,  -M_PI / 2, 20.0, Vector3d(-0.40, 0.0, 0.10), box(20.0, 0.85, 0.15, 0.15), 2.0, 1.5};
  l[2] = {0.20, -M_PI / 2, 0.0,  0.0,      12.0, Vector3d(-0.08, 0.02, 0.0), box(12.0, 0.25, 0.12, 0.12), 1.5, 1.0};
  l[3] = {0.0,  M_PI / 2,  0.60, 0.0,       6.0, Vector3d(0.0, -0.05, -0.25), box(6.0, 0.10, 0.10, 0.60), 0.8, 0.5};
  l[4] = {0.0,  -M_PI / 2, 0.0,  0.0,       3.0, Vector3d(0.0, 0.04, 0.0),   box(3.0, 0.08, 0.10, 0.08), 0.5, 0.3};
  l[5] = {0.0,  0.0,       0.15, 0.0,       1.5, Vector3d(0.0, 0.0, -0.06),  box(1.5, 0.06, 0.06, 0.12), 0.3, 0.2};
  return arm;
}

/// Default landmark layout: 8 landmarks spread around a roughly 3 m cube
/// enclosing the workspace; 4 of them are surveyed anchors placed
/// asymmetrically (symmetric layouts make the reset candidates tie).
inline LandmarkMap default_map() {
  LandmarkMap map;
  map.mapped = {Vector3d(2.1, -1.7, 3.1), Vector3d(-1.9, 2.3, 0.3), Vector3d(2.2, 1.8, 3.3),
                Vector3d(-2.3, -2.1, 2.9)};
  map.anchors = {Vector3d(2.6, 1.9, 0.2), Vector3d(-1.5, 2.4, 3.0), Vector3d(-2.4, -1.6, 0.5),
                 Vector3d(1.8, -2.5, 2.7)};
  return map;
}

namespace detail {

inline std::string vec_to_string(const VectorXd& v) {
  std::string out;
  char buf[64];
  for (int i = 0; i < v.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v(i),
                                   std::chars_format::general, 17);
    if (i) out += ' ';
    out.append(buf, res.ptr);
  }
  return out;
}

inline Matrix3d parse_attitude(const FlatConfig& cfg, const std::string& key) {
  const std::string s = cfg.get_string(key, "identity");
  if (s == "identity") return Matrix3d::Identity();
  const VectorXd v = cfg.get_vector(key, 4);  // angle, axis
  return rodrigues(v(0), Vector3d(v.segment<3>(1)).normalized());
}

}  // namespace detail

/// Builds a simulation from a flat config; unknown keys are rejected so
/// typos fail loudly. Missing keys fall back to the documented defaults.
inline SimulationConfig load_scenario(const FlatConfig& cfg) {
  SimulationConfig sim;
  sim.arm = default_arm();
  sim.map = default_map();

  sim.dt = cfg.get_double("sim.dt", sim.dt);
  sim.duration = cfg.get_double("sim.duration", sim.duration);
  sim.seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed", 0));
  sim.min_flow_between_jumps =
      cfg.get_double("sim.min_flow_between_jumps", sim.min_flow_between_jumps);
  sim.max_jumps_per_instant =
      static_cast<int>(cfg.get_int("sim.max_jumps_per_instant", sim.max_jumps_per_instant));
  sim.event_time_tol = cfg.get_double("sim.event_time_tol", sim.event_time_tol);

  const std::string mode = cfg.get_string("feedback.mode", "estimated");
  if (mode == "estimated") {
    sim.feedback_estimated = true;
  } else if (mode == "true-pose") {
    sim.feedback_estimated = false;
  } else {
    throw std::runtime_error("feedback.mode must be 'estimated' or 'true-pose'");
  }
  sim.warmup_hold = cfg.get_double("feedback.warmup_hold", 3.0);

  if (cfg.has("arm.gravity")) sim.arm.gravity = cfg.get_vec3("arm.gravity");
  sim.arm.coulomb_smoothing = cfg.get_double("arm.coulomb_smoothing", sim.arm.coulomb_smoothing);
  for (int i = 0; i < kJoints; ++i) {
    const std::string p = "arm.link" + std::to_string(i + 1) + ".";
    auto& link = sim.arm.links[i];
    if (cfg.has(p + "dh")) {
      const VectorXd dh = cfg.get_vector(p + "dh", 4);
      link.a = dh(0);
      link.alpha = dh(1);
      link.d = dh(2);
      link.theta_offset = dh(3);
    }
    link.mass = cfg.get_double(p + "mass", link.mass);
    if (cfg.has(p + "com")) link.com = cfg.get_vec3(p + "com");
    if (cfg.has(p + "inertia_diag")) {
      link.inertia = Matrix3d(Vector3d(cfg.get_vec3(p + "inertia_diag")).asDiagonal());
    }
    if (cfg.has(p + "friction")) {
      const VectorXd f = cfg.get_vector(p + "friction", 2);
      link.viscous = f(0);
      link.coulomb = f(1);
    }
  }

  // landmark catalog; listing any landmark key replaces the whole default map
  {
    LandmarkMap map;
    for (int i = 1; cfg.has("map.mapped" + std::to_string(i)); ++i) {
      map.mapped.push_back(cfg.get_vec3("map.mapped" + std::to_string(i)));
    }
    for (int i = 1; cfg.has("map.anchor" + std::to_string(i)); ++i) {
      map.anchors.push_back(cfg.get_vec3("map.anchor" + std::to_string(i)));
    }
    if (map.total() > 0) sim.map = map;
  }

  const int catalog = sim.map.total();
  sim.observer.k = VectorXd::Zero(catalog);
  const double k_mapped = cfg.get_double("observer.weight_mapped", 0.05);
  const double k_anchor = cfg.get_double("observer.weight_anchor", 0.05);
  for (int i = 0; i < sim.map.mapped_count(); ++i) sim.observer.k(i) = k_mapped;
  for (int i = 0; i < sim.map.anchor_count(); ++i) {
    sim.observer.k(sim.map.mapped_count() + i) = k_anchor;
  }
  sim.observer.k_o = cfg.get_double("observer.gain", 100.0);
  const std::string delta = cfg.get_string("observer.delta", "auto");
  if (delta == "auto") {
    sim.observer_delta_auto = true;
    sim.observer.delta = 0.05;  // placeholder until the startup rule runs
  } else {
    sim.observer.delta = cfg.get_double("observer.delta");
  }
  sim.observer.theta = cfg.get_double("observer.theta", M_PI / 2);
  if (cfg.has("observer.ell")) sim.observer.ell = cfg.get_vec3("observer.ell").normalized();
  sim.observer.q_max = static_cast<int>(cfg.get_int("observer.q_max", 3));

  sim.xhat0_landmarks_from_map = true;

  if (cfg.has("controller.weight_diag")) {
    sim.controller.weight =
        Matrix4d(Eigen::Vector4d(cfg.get_vector("controller.weight_diag", 4)).asDiagonal());
  }
  sim.controller.damping = cfg.get_double("controller.damping", 5.0);
  if (cfg.has("controller.axis")) {
    sim.controller.switch_axis = cfg.get_vec3("controller.axis").normalized();
  }
  if (cfg.has("controller.theta_grid")) {
    std::istringstream in(cfg.get_string("controller.theta_grid"));
    sim.controller.theta_grid.clear();
    double v;
    while (in >> v) sim.controller.theta_grid.push_back(v);
  }
  sim.controller.delta_c = cfg.get_double("controller.delta_c", 0.02 * sim.controller.weight.trace());
  sim.controller.cond_limit = cfg.get_double("controller.cond_limit", 1e6);
  sim.controller.dls_damping = cfg.get_double("controller.dls_damping", 1e-3);
  sim.h0 = cfg.get_double("controller.h0", 0.0);

  const std::string kind = cfg.get_string("trajectory.kind", "square");
  if (kind == "square") {
    sim.trajectory.kind = TrajectorySpec::Kind::square;
    auto& sq = sim.trajectory.square;
    if (cfg.has("trajectory.square.center")) sq.center = cfg.get_vec3("trajectory.square.center");
    sq.attitude = detail::parse_attitude(cfg, "trajectory.square.attitude");
    if (cfg.has("trajectory.square.normal")) {
      sq.normal = cfg.get_vec3("trajectory.square.normal").normalized();
    }
    sq.side = cfg.get_double("trajectory.square.side", 0.5);
    sq.speed = cfg.get_double("trajectory.square.speed", 0.05);
    sq.lead_in = cfg.get_double("trajectory.square.lead_in", 5.0);
  } else if (kind == "hold") {
    sim.trajectory.kind = TrajectorySpec::Kind::hold;
    sim.trajectory.hold_pose =
        RigidPose(Rotation(detail::parse_attitude(cfg, "trajectory.hold.attitude")),
                  cfg.has("trajectory.hold.position") ? cfg.get_vec3("trajectory.hold.position")
                                                      : Vector3d(0.9, 0.0, 0.7));
    sim.trajectory.hold_duration = cfg.get_double("trajectory.hold.duration", sim.duration);
  } else if (kind == "segments") {
    sim.trajectory.kind = TrajectorySpec::Kind::segments;
    sim.trajectory.segments.clear();
    for (int i = 1;; ++i) {
      const std::string p = "trajectory.segment" + std::to_string(i) + ".";
      if (!cfg.has(p + "duration")) break;
      ReferenceSegment seg;
      seg.start = RigidPose(Rotation(detail::parse_attitude(cfg, p + "attitude")),
                            cfg.get_vec3(p + "position"));
      const VectorXd tw = cfg.get_vector(p + "twist", 6);
      seg.twist = Twist(Vector6d(tw));
      seg.duration = cfg.get_double(p + "duration");
      sim.trajectory.segments.push_back(seg);
    }
    if (sim.trajectory.segments.empty()) {
      throw std::runtime_error("trajectory.kind = segments but no trajectory.segmentN.* keys");
    }
  } else {
    throw std::runtime_error("trajectory.kind must be square, hold, or segments");
  }

  // initial joints: explicit values or damped-least-squares IK to the start
  // pose, optionally with a prescribed attitude offset (the resulting initial
  // tracking error is exactly that offset)
  const std::string q0 = cfg.get_string("initial.q", "auto");
  if (q0 == "auto") {
    const ReferenceSampler sampler(expand_trajectory(sim.trajectory));
    Vector6d guess;
    guess << 0.0, -0.6, 0.9, 0.0, 0.6, 0.0;  // elbow-down seed
    if (cfg.has("initial.q_guess")) guess = Vector6d(cfg.get_vector("initial.q_guess", 6));
    RigidPose target = sampler.sample(0.0).x_d;
    if (cfg.has("initial.attitude_offset")) {
      target.rot = Rotation(target.rot.matrix() *
                            detail::parse_attitude(cfg, "initial.attitude_offset"));
    }
    sim.q0 = solve_ik(sim.arm, target, guess);
  } else {
    sim.q0 = Vector6d(cfg.get_vector("initial.q", 6));
  }
  if (cfg.has("initial.qd")) sim.qd0 = Vector6d(cfg.get_vector("initial.qd", 6));

  // Observer initialization: absolute keys win; offsets compose with the
  // true initial pose; the default is the true initial pose itself.
  {
    const RigidPose x0 = forward_kinematics(sim.arm, sim.q0);
    sim.xhat0_pos = cfg.has("observer.init_position") ? cfg.get_vec3("observer.init_position")
                                                      : x0.pos;
    if (cfg.has("observer.init_attitude")) {
      sim.xhat0_rot = detail::parse_attitude(cfg, "observer.init_attitude");
    } else {
      sim.xhat0_rot =
          detail::parse_attitude(cfg, "observer.init_attitude_offset") * x0.rot.matrix();
    }
  }

  sim.noise.enabled = cfg.get_bool("noise.enabled", false);
  sim.noise.sigma_range = cfg.get_double("noise.sigma_range", 0.0);
  sim.noise.sigma_bearing = cfg.get_double("noise.sigma_bearing", 0.0);
  return sim;
}

inline SimulationConfig load_scenario_file(const std::string& path) {
  return load_scenario(FlatConfig::parse_file(path));
}

}  // namespace slamarm

#endif  // SLAMARM_SCENARIO_HPP
