// slamarm - deterministic hybrid executor: coupled plant/observer flows,
// jump-set event detection and the Lyapunov certificate monitor
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_HYBRID_SIM_HPP
#define SLAMARM_HYBRID_SIM_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "slamarm/controller.hpp"
#include "slamarm/dynamics.hpp"
#include "slamarm/lie.hpp"
#include "slamarm/measurement.hpp"
#include "slamarm/observer.hpp"
#include "slamarm/trajectory.hpp"

namespace slamarm {

struct HybridTime {
  double t = 0.0;
  int j = 0;
};

struct SimulationConfig {
  double dt = 5e-4;
  double duration = 45.0;
  ArmParameters arm;
  LandmarkMap map;
  ObserverGains observer;
  bool observer_delta_auto = false;
  ControllerGains controller;
  TrajectorySpec trajectory;
  Vector6d q0 = Vector6d::Zero();
  Vector6d qd0 = Vector6d::Zero();
  Vector3d xhat0_pos = Vector3d::Zero();
  Matrix3d xhat0_rot = Matrix3d::Identity();
  bool xhat0_landmarks_from_map = true;  // else xhat0_landmarks
  Matrix3Xd xhat0_landmarks = Matrix3Xd(3, 0);
  double h0 = 0.0;
  bool feedback_estimated = true;  // false: certificate mode, true pose fed back
  double warmup_hold = 1.0;        // s of gravity hold before closing the task loop
  MeasurementNoise noise;
  std::uint64_t seed = 0;
  double min_flow_between_jumps = 1e-3;
  int max_jumps_per_instant = 4;
  double event_time_tol = 1e-6;
};

/// Flow-time sample of everything the monitors, plots and reports consume.
struct TraceRow {
  double t = 0.0;
  int j = 0;
  Vector6d q, qd, tau;
  RigidPose pose_true, pose_est, pose_des, pose_err;
  Vector6d vel_err = Vector6d::Zero();
  double u_obs = 0.0;     // observer potential, true error
  double u_ctl = 0.0;     // controller potential, true error
  double kinetic = 0.0;   // 0.5 |pose_vee(Y)|^2
  double v = 0.0;         // Lyapunov candidate
  double vdot_numeric = std::numeric_limits<double>::quiet_NaN();
  double vdot_closed = 0.0;
  int obs_q = 0;
  double h = 0.0;
  double cond_j = 0.0;
  double residual = 0.0;      // |Z' + commanded twist rate|
  double est_pos_err = 0.0;   // |p - phat|
  double est_att_err = 0.0;   // |R - Rhat|_F
  double trk_pos_err = 0.0;   // |p - p_d|
  double trk_att_err = 0.0;   // |R - R_d|_F
  double err_norm = 0.0;      // |Xtilde - I|_F
  double dual_path_gap = 0.0; // |FK pose - integrated pose|_F
  double meas_equiv_gap = 0.0;  // |sensor-domain U - error-domain U|
  bool flow_clean = true;     // no event in the adjacent steps
  std::string events;         // ';'-separated markers, empty if none
};

struct JumpRecord {
  double t = 0.0;
  int j = 0;
  std::string kind;  // "observer" or "controller"
  double dv = 0.0;   // V after - V before
  double dpot = 0.0; // potential drop of the jumping subsystem
  double flow_since_previous = 0.0;
};

struct LyapunovReport {
  bool certificate_mode = false;         // true-pose feedback: full certificate enforced
  double max_flow_vdot = -std::numeric_limits<double>::infinity();
  double max_flow_v_increase = 0.0;      // max V(t_{k+1}) - V(t_k) on clean flow
  double max_vdot_mismatch_rel = 0.0;    // numeric vs closed form, clean flow
  std::vector<JumpRecord> jumps;
  int observer_jumps = 0;
  int controller_jumps = 0;
  double min_flow_between_jumps = std::numeric_limits<double>::infinity();
  double final_error_norm = 0.0;    // |Xtilde - I|_F at the end
  double final_trk_pos_err = 0.0;
  double final_trk_att_err = 0.0;
  double steady_trk_pos_err = 0.0;  // mean over the trailing quarter
  double steady_est_pos_err = 0.0;
  double max_residual = 0.0;
  double max_dual_path_gap = 0.0;
  double max_meas_equiv_gap = 0.0;
  int singularity_events = 0;
  // enforced in every mode
  bool pass_v_nonnegative = true;
  bool pass_jump_potential_drop = true;  // each jump lowers its own potential by >= delta
  bool pass_non_zeno = true;
  // enforced only in certificate mode, reported otherwise
  bool pass_flow_monotone = true;
  bool pass_jump_v_decrease = true;
  bool pass_vdot_match = true;

  bool all_pass() const {
    const bool base = pass_v_nonnegative && pass_jump_potential_drop && pass_non_zeno;
    if (!certificate_mode) return base;
    return base && pass_flow_monotone && pass_jump_v_decrease && pass_vdot_match;
  }
};

struct SimulationResult {
  std::vector<TraceRow> trace;
  LyapunovReport report;
};

class HybridSimulator {
 public:
  explicit HybridSimulator(const SimulationConfig& cfg)
      : cfg_(cfg),
        model_(cfg.map, cfg.observer),
        sampler_(expand_trajectory(cfg.trajectory)),
        rng_(cfg.seed) {
    cfg_.arm.validate();
    cfg_.controller.validate();
    n_ = cfg_.map.mapped_count();
    state_ = pack_initial();
    if (cfg_.noise.enabled) hold_noise_for_step(0.0);
    if (cfg_.observer_delta_auto) {
      ObserverGains g = model_.gains();
      g.delta = auto_delta();
      model_ = SensorModel(cfg_.map, g);
    }
  }

  const SensorModel& model() const { return model_; }
  const ReferenceSampler& sampler() const { return sampler_; }

  /// Runs the full horizon; throws on integration failure or Zeno violation.
  SimulationResult run() {
    SimulationResult out;
    const int steps = static_cast<int>(std::llround(cfg_.duration / cfg_.dt));
    out.trace.reserve(steps + 1);

    double t = 0.0;
    int j = 0;
    double t_last_jump = std::numeric_limits<double>::quiet_NaN();
    int last_segment = sampler_.segment_index(0.0);
    const double end_time = sampler_.total_duration();

    std::string events = apply_jumps(t, &j, &t_last_jump, &out.report);
    out.trace.push_back(record(t, j, events));

    for (int k = 0; k < steps; ++k) {
      const double t_prev = t;
      const double t_next = (k + 1) * cfg_.dt;  // row times stay drift-free
      std::string step_events;
      double remaining = t_next - t;
      int events_this_step = 0;
      while (remaining > 1e-15) {
        const VectorXd before = state_;
        hold_noise_for_step(t);
        VectorXd after = integrate(before, t, remaining);
        if (margins_clear(after, t + remaining)) {
          state_ = after;
          t += remaining;
          remaining = 0.0;
        } else {
          // bisection to the earliest jump-set entry
          double lo = 0.0, hi = remaining;
          while (hi - lo > cfg_.event_time_tol) {
            const double mid = 0.5 * (lo + hi);
            if (margins_clear(integrate(before, t, mid), t + mid)) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
          state_ = integrate(before, t, hi);
          t += hi;
          remaining -= hi;
          const std::string ev = apply_jumps(t, &j, &t_last_jump, &out.report);
          if (!ev.empty()) {
            step_events += step_events.empty() ? ev : ";" + ev;
          }
          if (++events_this_step > 8) {
            throw std::runtime_error("hybrid_sim: too many events inside one step at t=" +
                                     std::to_string(t));
          }
        }
      }
      t = t_next;
      if (!state_.allFinite()) {
        throw std::runtime_error("hybrid_sim: non-finite state at t=" + std::to_string(t) +
                                 " j=" + std::to_string(j));
      }
      reproject_rotations();
      const int seg = sampler_.segment_index(t + 0.5 * cfg_.dt);
      const bool past_end = t_prev < end_time && t + 0.5 * cfg_.dt >= end_time;
      if (seg != last_segment || past_end) {
        step_events += step_events.empty() ? "reference-segment" : ";reference-segment";
        last_segment = seg;
      }
      if (cfg_.feedback_estimated && cfg_.warmup_hold > 0.0 && t_prev < cfg_.warmup_hold &&
          t >= cfg_.warmup_hold) {
        step_events += step_events.empty() ? "warmup-end" : ";warmup-end";
      }
      out.trace.push_back(record(t, j, step_events));
    }

    finalize(out);
    return out;
  }

  /// Lyapunov candidate and its pieces at a packed state (true-error monitor).
  struct Lyapunov {
    double u_obs = 0.0, u_ctl = 0.0, kinetic = 0.0, v = 0.0, vdot_closed = 0.0;
  };
  Lyapunov lyapunov(const VectorXd& y, double t) const {
    const ArmEval ev = evaluate_arm(cfg_.arm, {Vector6d(y.segment<6>(0)), Vector6d(y.segment<6>(6))});
    return lyapunov(y, t, ev);
  }
  Lyapunov lyapunov(const VectorXd& y, double t, const ArmEval& ev) const {
    Lyapunov out;
    const SlamElement truth(ev.pose.rot, ev.pose.pos, cfg_.map.mapped_matrix());
    const ObserverState obs = unpack_observer(y);
    const SlamElement err = estimation_error(truth, obs);
    out.u_obs = potential_from_error(err, model_.weight_matrix());

    const DesiredMotion des = sampler_.sample(t);
    const RigidPose x_e = tracking_error(des.x_d, ev.pose);
    out.u_ctl = controller_potential(x_e, h_, cfg_.controller);
    const Twist y_err = velocity_error(x_e, Twist(ev.twist), des.w_d);
    const Vector6d ybar = pose_vee(y_err.matrix());
    out.kinetic = 0.5 * ybar.squaredNorm();
    out.v = out.u_obs + out.u_ctl + out.kinetic;
    out.vdot_closed = -model_.gains().k_o *
                          innovation_from_error(err, model_.weight_matrix()).squaredNorm() -
                      cfg_.controller.damping * ybar.squaredNorm();
    return out;
  }

  /// One flow step of `dt` from the packed state (no event handling); used by
  /// the step-halving order oracle.
  VectorXd flow_step(const VectorXd& y, double t, double dt) {
    hold_noise_for_step(t);
    return integrate(y, t, dt);
  }
  const VectorXd& packed_state() const { return state_; }
  ObserverState observer_state() const { return unpack_observer(state_); }
  double switch_angle() const { return h_; }

 private:
  // layout: q(6) qd(6) phat(3) Rhat(9) eta(3n) p_int(3) R_int(9)
  int idx_phat() const { return 12; }
  int idx_rhat() const { return 15; }
  int idx_eta() const { return 24; }
  int idx_pint() const { return 24 + 3 * n_; }
  int idx_rint() const { return 27 + 3 * n_; }
  int packed_size() const { return 36 + 3 * n_; }

  VectorXd pack_initial() {
    VectorXd y = VectorXd::Zero(packed_size());
    y.segment<6>(0) = cfg_.q0;
    y.segment<6>(6) = cfg_.qd0;
    y.segment<3>(idx_phat()) = cfg_.xhat0_pos;
    Eigen::Map<Matrix3d>(y.data() + idx_rhat()) = cfg_.xhat0_rot;
    const Matrix3Xd eta0 =
        cfg_.xhat0_landmarks_from_map ? cfg_.map.mapped_matrix() : cfg_.xhat0_landmarks;
    if (eta0.cols() != n_) throw std::invalid_argument("xhat0 landmark block size mismatch");
    Eigen::Map<Matrix3Xd>(y.data() + idx_eta(), 3, n_) = eta0;
    const RigidPose x0 = forward_kinematics(cfg_.arm, cfg_.q0);
    y.segment<3>(idx_pint()) = x0.pos;
    Eigen::Map<Matrix3d>(y.data() + idx_rint()) = x0.rot.matrix();
    h_ = cfg_.h0;
    return y;
  }

  ObserverState unpack_observer(const VectorXd& y) const {
    SlamElement xhat(Rotation(Matrix3d(Eigen::Map<const Matrix3d>(y.data() + idx_rhat()))),
                     Vector3d(y.segment<3>(idx_phat())),
                     Matrix3Xd(Eigen::Map<const Matrix3Xd>(y.data() + idx_eta(), 3, n_)));
    return {xhat, q_switch_};
  }

  RigidPose unpack_integrated(const VectorXd& y) const {
    return {Rotation(Matrix3d(Eigen::Map<const Matrix3d>(y.data() + idx_rint()))),
            Vector3d(y.segment<3>(idx_pint()))};
  }

  SlamElement truth_of(const VectorXd& y) const {
    const RigidPose x = forward_kinematics(cfg_.arm, Vector6d(y.segment<6>(0)));
    return {x.rot, x.pos, cfg_.map.mapped_matrix()};
  }

  CameraMeasurement measurement_at(const VectorXd& y, double /*t*/) const {
    if (cfg_.noise.enabled) return held_measurement_;
    return measure(truth_of(y), cfg_.map);
  }

  CameraMeasurement measurement_at(const VectorXd&, double, const ArmEval& ev) const {
    if (cfg_.noise.enabled) return held_measurement_;
    return measure(SlamElement(ev.pose.rot, ev.pose.pos, cfg_.map.mapped_matrix()), cfg_.map);
  }

  void hold_noise_for_step(double t) {
    if (cfg_.noise.enabled) {
      held_measurement_ = measure(truth_of(state_), cfg_.map, cfg_.noise, &rng_);
    }
    (void)t;
  }

  /// Torque at a stage state from precomputed kinematics; honors the warm-up
  /// hold and the feedback mode.
  TorqueCommand stage_torque(const VectorXd& y, double t, const ArmEval& ev) const {
    TorqueCommand cmd;
    if (cfg_.feedback_estimated && t < cfg_.warmup_hold) {
      cmd.tau = ev.bias;
      return cmd;
    }
    const DesiredMotion des = sampler_.sample(t);
    RigidPose x_fb;
    if (cfg_.feedback_estimated) {
      const ObserverState obs = unpack_observer(y);
      x_fb = RigidPose(obs.xhat.rot, obs.xhat.pos);
    } else {
      x_fb = ev.pose;
    }
    const RigidPose x_e = tracking_error(des.x_d, x_fb);
    const Twist y_err = velocity_error(x_e, Twist(ev.twist), des.w_d);
    const Twist transported(Vector6d(ev.twist - y_err.vector()));
    const Vector6d u = twist_rate_command(x_e, y_err, transported, h_, cfg_.controller);

    Eigen::JacobiSVD<Matrix6d> svd(ev.jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(5);
    cmd.jacobian_condition =
        smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
    cmd.twist_rate = -u;
    const Vector6d rhs = ev.jac_dot * Vector6d(y.segment<6>(6)) + u;
    Vector6d qdd_cmd;
    if (cmd.jacobian_condition > cfg_.controller.cond_limit) {
      cmd.singular = true;
      const double lam2 = cfg_.controller.dls_damping * cfg_.controller.dls_damping;
      qdd_cmd = -(ev.jac.transpose() *
                  (ev.jac * ev.jac.transpose() + lam2 * Matrix6d::Identity()).ldlt().solve(rhs));
    } else {
      qdd_cmd = -ev.jac.partialPivLu().solve(rhs);
    }
    cmd.tau = ev.mass * qdd_cmd + ev.bias;
    return cmd;
  }

  VectorXd derivative(const VectorXd& y, double t) const {
    VectorXd dy = VectorXd::Zero(packed_size());
    const Vector6d qd = y.segment<6>(6);
    const ArmEval ev = evaluate_arm(cfg_.arm, {Vector6d(y.segment<6>(0)), qd});
    const TorqueCommand cmd = stage_torque(y, t, ev);
    dy.segment<6>(0) = qd;
    dy.segment<6>(6) = ev.mass.ldlt().solve(cmd.tau - ev.bias);

    // observer flow
    const CameraMeasurement meas = measurement_at(y, t, ev);
    const ObserverState obs = unpack_observer(y);
    const SlamTangent twist = SlamTangent::from_twist(Twist(ev.twist), n_);
    const SlamTangent delta = correction(meas, obs.xhat, model_);
    const Matrix3d rhat = obs.xhat.rot.matrix();
    const Vector3d w_eff = twist.omega - delta.omega;
    dy.segment<3>(idx_phat()) = rhat * (twist.vel - delta.vel);
    Eigen::Map<Matrix3d>(dy.data() + idx_rhat()) = rhat * hat(w_eff);
    Eigen::Map<Matrix3Xd>(dy.data() + idx_eta(), 3, n_) = rhat * (twist.xi - delta.xi);

    // redundant pose propagation X' = X W for the dual-path check
    const Matrix3d rint = Eigen::Map<const Matrix3d>(y.data() + idx_rint());
    dy.segment<3>(idx_pint()) = rint * ev.twist.tail<3>();
    Eigen::Map<Matrix3d>(dy.data() + idx_rint()) = rint * hat(Vector3d(ev.twist.head<3>()));
    return dy;
  }

  VectorXd integrate(const VectorXd& y, double t, double dt) const {
    const VectorXd k1 = derivative(y, t);
    const VectorXd k2 = derivative(y + 0.5 * dt * k1, t + 0.5 * dt);
    const VectorXd k3 = derivative(y + 0.5 * dt * k2, t + 0.5 * dt);
    const VectorXd k4 = derivative(y + dt * k3, t + dt);
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  void reproject_rotations() {
    Eigen::Map<Matrix3d> rhat(state_.data() + idx_rhat());
    rhat = project_to_so3(rhat);
    Eigen::Map<Matrix3d> rint(state_.data() + idx_rint());
    rint = project_to_so3(rint);
  }

  double observer_margin(const VectorXd& y, double t) const {
    const CameraMeasurement meas = measurement_at(y, t);
    return jump_margin(unpack_observer(y), meas, model_);
  }

  double controller_margin(const VectorXd& y, double t) const {
    if (cfg_.feedback_estimated && t < cfg_.warmup_hold) return -1.0;
    const DesiredMotion des = sampler_.sample(t);
    RigidPose x_fb;
    if (cfg_.feedback_estimated) {
      const ObserverState obs = unpack_observer(y);
      x_fb = RigidPose(obs.xhat.rot, obs.xhat.pos);
    } else {
      x_fb = forward_kinematics(cfg_.arm, Vector6d(y.segment<6>(0)));
    }
    return switch_margin(tracking_error(des.x_d, x_fb), ControllerState{h_}, cfg_.controller);
  }

  bool margins_clear(const VectorXd& y, double t) const {
    return observer_margin(y, t) < 0.0 && controller_margin(y, t) < 0.0;
  }

  /// Applies pending jump maps at the current instant, observer first, then
  /// controller, re-evaluating after each. Returns the event markers.
  std::string apply_jumps(double t, int* j, double* t_last_jump, LyapunovReport* report) {
    std::string events;
    int applied = 0;
    while (true) {
      const bool obs_due = observer_margin(state_, t) >= 0.0;
      const bool ctl_due = controller_margin(state_, t) >= 0.0;
      if (!obs_due && !ctl_due) break;
      if (++applied > cfg_.max_jumps_per_instant) {
        throw std::runtime_error("hybrid_sim: Zeno guard tripped at t=" + std::to_string(t));
      }
      JumpRecord rec;
      rec.t = t;
      const Lyapunov before = lyapunov(state_, t);
      if (obs_due) {
        const CameraMeasurement meas = measurement_at(state_, t);
        const ObserverState obs = unpack_observer(state_);
        const double pot_before = potential(meas, obs.xhat, model_);
        const ObserverState next = observer_jump(obs, meas, model_);
        q_switch_ = next.q;
        state_.segment<3>(idx_phat()) = next.xhat.pos;
        Eigen::Map<Matrix3d>(state_.data() + idx_rhat()) = next.xhat.rot.matrix();
        Eigen::Map<Matrix3Xd>(state_.data() + idx_eta(), 3, n_) = next.xhat.landmarks;
        rec.kind = "observer";
        rec.dpot = potential(measurement_at(state_, t), next.xhat, model_) - pot_before;
        report->observer_jumps += 1;
        events += events.empty() ? "observer-jump" : ";observer-jump";
      } else {
        const DesiredMotion des = sampler_.sample(t);
        RigidPose x_fb;
        if (cfg_.feedback_estimated) {
          const ObserverState obs = unpack_observer(state_);
          x_fb = RigidPose(obs.xhat.rot, obs.xhat.pos);
        } else {
          x_fb = forward_kinematics(cfg_.arm, Vector6d(state_.segment<6>(0)));
        }
        const RigidPose x_e = tracking_error(des.x_d, x_fb);
        const double pot_before = controller_potential(x_e, h_, cfg_.controller);
        h_ = switch_update(x_e, ControllerState{h_}, cfg_.controller).h;
        rec.kind = "controller";
        rec.dpot = controller_potential(x_e, h_, cfg_.controller) - pot_before;
        report->controller_jumps += 1;
        events += events.empty() ? "controller-jump" : ";controller-jump";
      }
      *j += 1;
      rec.j = *j;
      rec.dv = lyapunov(state_, t).v - before.v;
      // flow time since the previous jump instant; serialized jumps within
      // one instant form a single cascade and carry no flow-time reading
      if (std::isnan(*t_last_jump)) {
        rec.flow_since_previous = std::numeric_limits<double>::infinity();
      } else if (t == *t_last_jump) {
        rec.flow_since_previous = std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.flow_since_previous = t - *t_last_jump;
      }
      *t_last_jump = t;
      report->jumps.push_back(rec);
    }
    return events;
  }

  TraceRow record(double t, int j, const std::string& events) {
    TraceRow row;
    row.t = t;
    row.j = j;
    row.q = state_.segment<6>(0);
    row.qd = state_.segment<6>(6);
    const ArmEval ev = evaluate_arm(cfg_.arm, {row.q, row.qd});
    const TorqueCommand cmd = stage_torque(state_, t, ev);
    row.tau = cmd.tau;
    row.cond_j = cmd.jacobian_condition;
    if (cmd.singular) {
      row.events = events.empty() ? "singularity-warning" : events + ";singularity-warning";
    } else {
      row.events = events;
    }

    row.pose_true = ev.pose;
    const ObserverState obs = unpack_observer(state_);
    row.pose_est = RigidPose(obs.xhat.rot, obs.xhat.pos);
    const DesiredMotion des = sampler_.sample(t);
    row.pose_des = des.x_d;
    row.pose_err = tracking_error(des.x_d, row.pose_true);
    const Twist y_err = velocity_error(row.pose_err, Twist(ev.twist), des.w_d);
    row.vel_err = y_err.vector();
    row.obs_q = obs.q;
    row.h = h_;

    const Lyapunov lv = lyapunov(state_, t, ev);
    row.u_obs = lv.u_obs;
    row.u_ctl = lv.u_ctl;
    row.kinetic = lv.kinetic;
    row.v = lv.v;
    row.vdot_closed = lv.vdot_closed;

    // feedback-linearization residual: Zdot from the plant vs the command
    {
      const Vector6d qdd = ev.mass.ldlt().solve(cmd.tau - ev.bias);
      const Vector6d zdot = ev.jac * qdd + ev.jac_dot * row.qd;
      const bool holding = cfg_.feedback_estimated && t < cfg_.warmup_hold;
      row.residual = holding ? 0.0 : (zdot - cmd.twist_rate).norm();
    }

    const SlamElement truth(ev.pose.rot, ev.pose.pos, cfg_.map.mapped_matrix());
    const SlamElement err = estimation_error(truth, obs);
    row.err_norm = err.defect_from_identity();
    row.est_pos_err = (row.pose_true.pos - row.pose_est.pos).norm();
    row.est_att_err = (row.pose_true.rot.matrix() - row.pose_est.rot.matrix()).norm();
    row.trk_pos_err = (row.pose_true.pos - des.x_d.pos).norm();
    row.trk_att_err = (row.pose_true.rot.matrix() - des.x_d.rot.matrix()).norm();

    const RigidPose integrated = unpack_integrated(state_);
    row.dual_path_gap =
        (integrated.homogeneous() - row.pose_true.homogeneous()).norm();
    row.meas_equiv_gap = std::abs(potential(measurement_at(state_, t, ev), obs.xhat, model_) -
                                  lv.u_obs);
    return row;
  }

  double auto_delta() {
    hold_noise_for_step(0.0);
    const CameraMeasurement meas = measurement_at(state_, 0.0);
    const std::vector<double> pots =
        candidate_potentials(unpack_observer(state_), meas, model_);
    double min_gap = std::numeric_limits<double>::infinity();
    for (size_t q = 1; q < pots.size(); ++q) {
      const double gap = std::abs(pots[0] - pots[q]);
      if (gap > 1e-12 && gap < min_gap) min_gap = gap;
    }
    return std::isfinite(min_gap) ? 0.1 * min_gap : 0.05;
  }

  void finalize(SimulationResult& out) const {
    auto& rows = out.trace;
    auto& rep = out.report;
    const int n_rows = static_cast<int>(rows.size());
    // mark rows adjacent to events (jump, segment change, warm-up end)
    std::vector<bool> dirty(n_rows, false);
    for (int i = 0; i < n_rows; ++i) {
      if (!rows[i].events.empty()) {
        for (int d = -2; d <= 2; ++d) {
          const int k = i + d;
          if (k >= 0 && k < n_rows) dirty[k] = true;
        }
      }
    }
    for (int i = 0; i < n_rows; ++i) {
      rows[i].flow_clean = !dirty[i] && i >= 2 && i < n_rows - 2;
    }
    // five-point central stencil for the numeric Lyapunov rate
    for (int i = 2; i < n_rows - 2; ++i) {
      if (!rows[i].flow_clean) continue;
      rows[i].vdot_numeric = (-rows[i + 2].v + 8.0 * rows[i + 1].v - 8.0 * rows[i - 1].v +
                              rows[i - 2].v) /
                             (12.0 * cfg_.dt);
    }
    const double v_scale = std::max(1.0, rows.empty() ? 1.0 : rows.front().v);
    for (int i = 0; i < n_rows; ++i) {
      const auto& r = rows[i];
      if (r.v < -1e-12) rep.pass_v_nonnegative = false;
      rep.max_residual = std::max(rep.max_residual, r.residual);
      rep.max_dual_path_gap = std::max(rep.max_dual_path_gap, r.dual_path_gap);
      rep.max_meas_equiv_gap = std::max(rep.max_meas_equiv_gap, r.meas_equiv_gap);
      if (r.events.find("singularity-warning") != std::string::npos) rep.singularity_events++;
      if (i > 0 && !dirty[i] && !dirty[i - 1]) {
        rep.max_flow_v_increase = std::max(rep.max_flow_v_increase, r.v - rows[i - 1].v);
      }
      if (r.flow_clean && !std::isnan(r.vdot_numeric)) {
        rep.max_flow_vdot = std::max(rep.max_flow_vdot, r.vdot_numeric);
        const double mismatch = std::abs(r.vdot_numeric - r.vdot_closed) /
                                std::max(std::abs(r.vdot_closed), 1e-6 * v_scale);
        rep.max_vdot_mismatch_rel = std::max(rep.max_vdot_mismatch_rel, mismatch);
      }
    }
    rep.certificate_mode = !cfg_.feedback_estimated;
    for (const auto& jr : rep.jumps) {
      if (!std::isnan(jr.flow_since_previous)) {
        rep.min_flow_between_jumps = std::min(rep.min_flow_between_jumps, jr.flow_since_previous);
      }
      const double own_delta =
          jr.kind == "observer" ? model_.gains().delta : cfg_.controller.delta_c;
      if (jr.dpot > -own_delta + 1e-9) rep.pass_jump_potential_drop = false;
      const double bound = -std::min(model_.gains().delta, cfg_.controller.delta_c) + 1e-9;
      if (jr.dv > bound) rep.pass_jump_v_decrease = false;
    }
    if (!rep.jumps.empty() && rep.min_flow_between_jumps < cfg_.min_flow_between_jumps) {
      rep.pass_non_zeno = false;
    }
    if (rep.max_flow_v_increase > 1e-6) rep.pass_flow_monotone = false;
    if (rep.max_vdot_mismatch_rel > 1e-4) rep.pass_vdot_match = false;
    if (!rows.empty()) {
      rep.final_error_norm = rows.back().err_norm;
      rep.final_trk_pos_err = rows.back().trk_pos_err;
      rep.final_trk_att_err = rows.back().trk_att_err;
      double acc_trk = 0.0, acc_est = 0.0;
      int count = 0;
      for (int i = 3 * n_rows / 4; i < n_rows; ++i) {
        acc_trk += rows[i].trk_pos_err;
        acc_est += rows[i].est_pos_err;
        ++count;
      }
      rep.steady_trk_pos_err = count ? acc_trk / count : 0.0;
      rep.steady_est_pos_err = count ? acc_est / count : 0.0;
    }
  }

  SimulationConfig cfg_;
  SensorModel model_;
  ReferenceSampler sampler_;
  std::mt19937_64 rng_;
  int n_ = 0;
  VectorXd state_;
  double h_ = 0.0;
  int q_switch_ = 0;
  CameraMeasurement held_measurement_;
};

inline SimulationResult run_simulation(const SimulationConfig& cfg) {
  HybridSimulator sim(cfg);
  return sim.run();
}

}  // namespace slamarm

#endif  // SLAMARM_HYBRID_SIM_HPP
