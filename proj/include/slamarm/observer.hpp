// slamarm - hybrid gradient observer on SLAM_n(3)
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_OBSERVER_HPP
#define SLAMARM_OBSERVER_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "slamarm/lie.hpp"
#include "slamarm/measurement.hpp"

namespace slamarm {

struct ObserverGains {
  VectorXd k;          // per-catalog-entry measurement weights, all > 0
  double k_o = 100.0;  // scalar observer gain
  double delta = 0.05; // jump hysteresis
  double theta = M_PI / 2.0;      // reset angle
  Vector3d ell = Vector3d::UnitZ();  // reset axis, unit
  int q_max = 3;                     // candidate indices 0..q_max

  void validate(int catalog_size) const {
    if (k.size() != catalog_size) throw std::invalid_argument("ObserverGains: weight count mismatch");
    if ((k.array() <= 0.0).any()) throw std::invalid_argument("ObserverGains: weights must be positive");
    if (k_o <= 0.0 || delta <= 0.0 || theta <= 0.0) {
      throw std::invalid_argument("ObserverGains: k_o, delta, theta must be positive");
    }
    if (std::abs(ell.norm() - 1.0) > kOrthonormalTol) {
      throw std::invalid_argument("ObserverGains: ell must be a unit vector");
    }
    if (q_max < 1) throw std::invalid_argument("ObserverGains: q_max must be >= 1");
  }
};

struct ObserverState {
  SlamElement xhat;
  int q = 0;
};

/// Catalog-derived constants reused every step.
class SensorModel {
 public:
  SensorModel(const LandmarkMap& map, const ObserverGains& gains)
      : map_(map), refs_(reference_vectors(map)), gains_(gains) {
    map_.validate();
    gains_.validate(static_cast<int>(refs_.size()));
    const int d = map_.mapped_count() + 4;
    weight_ = MatrixXd::Zero(d, d);
    for (size_t i = 0; i < refs_.size(); ++i) {
      // outer product first so the accumulation stays exactly symmetric
      weight_ += gains_.k(i) * MatrixXd(refs_[i] * refs_[i].transpose());
    }
  }

  const LandmarkMap& map() const { return map_; }
  const ObserverGains& gains() const { return gains_; }
  const std::vector<VectorXd>& refs() const { return refs_; }
  /// A = sum_i k_i r_i r_i^T, symmetric positive semidefinite.
  const MatrixXd& weight_matrix() const { return weight_; }
  int mapped_count() const { return map_.mapped_count(); }

 private:
  LandmarkMap map_;
  std::vector<VectorXd> refs_;
  ObserverGains gains_;
  MatrixXd weight_;
};

/// Measurement-domain potential 0.5 * sum_i k_i |r_i - Xhat beta_i|^2.
inline double potential(const CameraMeasurement& meas, const SlamElement& xhat,
                        const SensorModel& model) {
  if (meas.count() != static_cast<int>(model.refs().size())) {
    throw std::invalid_argument("potential: measurement/catalog size mismatch");
  }
  const MatrixXd x = xhat.embed();
  double acc = 0.0;
  for (int i = 0; i < meas.count(); ++i) {
    acc += model.gains().k(i) * (model.refs()[i] - x * meas.beta[i]).squaredNorm();
  }
  return 0.5 * acc;
}

/// Error-domain potential 0.5 * tr((I - E) A (I - E)^T); equals `potential`
/// evaluated at E = X Xhat^{-1} (monitor/test route).
inline double potential_from_error(const SlamElement& err, const MatrixXd& weight) {
  const MatrixXd e = MatrixXd::Identity(err.dim(), err.dim()) - err.embed();
  return 0.5 * (e * weight * e.transpose()).trace();
}

/// Measurement-domain innovation, the algebra projection of
/// sum_i k_i (r_i - Xhat beta_i) r_i^T.
inline MatrixXd innovation(const CameraMeasurement& meas, const SlamElement& xhat,
                           const SensorModel& model) {
  const int d = xhat.dim();
  const MatrixXd x = xhat.embed();
  MatrixXd m = MatrixXd::Zero(d, d);
  for (int i = 0; i < meas.count(); ++i) {
    m += model.gains().k(i) * (model.refs()[i] - x * meas.beta[i]) * model.refs()[i].transpose();
  }
  return algebra_project(m);
}

/// Error-domain innovation Upsilon((I - E^{-1}) A) (monitor/test route).
inline MatrixXd innovation_from_error(const SlamElement& err, const MatrixXd& weight) {
  const MatrixXd m = (MatrixXd::Identity(err.dim(), err.dim()) - err.inverse().embed()) * weight;
  return algebra_project(m);
}

/// Flow correction: Delta = -Ad_{Xhat^{-1}} Upsilon(...) K with K = k_o I.
inline SlamTangent correction(const CameraMeasurement& meas, const SlamElement& xhat,
                              const SensorModel& model) {
  const MatrixXd inn = innovation(meas, xhat, model);
  const SlamTangent raw = SlamTangent::from_embed(-model.gains().k_o * inn);
  return slam_adjoint(xhat.inverse(), raw);
}

/// Reset candidate q: left rotation by q*theta about ell applied to Xhat.
inline SlamElement reset_candidate(const ObserverState& state, const ObserverGains& gains, int q) {
  const int n = state.xhat.landmark_count();
  const SlamElement turn(Rotation::axis_angle(q * gains.theta, gains.ell), Vector3d::Zero(),
                         Matrix3Xd::Zero(3, n));
  return turn * state.xhat;
}

/// Potentials of all reset candidates (index 0 is the current estimate).
inline std::vector<double> candidate_potentials(const ObserverState& state,
                                                const CameraMeasurement& meas,
                                                const SensorModel& model) {
  std::vector<double> out;
  out.reserve(model.gains().q_max + 1);
  for (int q = 0; q <= model.gains().q_max; ++q) {
    out.push_back(potential(meas, reset_candidate(state, model.gains(), q), model));
  }
  return out;
}

/// Signed distance into the jump set: current potential minus the best
/// candidate, minus the hysteresis delta. >= 0 means the jump set is active.
inline double jump_margin(const ObserverState& state, const CameraMeasurement& meas,
                          const SensorModel& model) {
  const std::vector<double> pots = candidate_potentials(state, meas, model);
  const double best = *std::min_element(pots.begin(), pots.end());
  return pots[0] - best - model.gains().delta;
}

/// Reset map: switch to the candidate of least potential. Must only be
/// invoked inside the jump set.
inline ObserverState observer_jump(const ObserverState& state, const CameraMeasurement& meas,
                                   const SensorModel& model) {
  const std::vector<double> pots = candidate_potentials(state, meas, model);
  const int best =
      static_cast<int>(std::min_element(pots.begin(), pots.end()) - pots.begin());
  if (pots[0] - pots[best] < model.gains().delta) {
    throw std::logic_error("observer_jump: invoked outside the jump set");
  }
  return {reset_candidate(state, model.gains(), best), best};
}

/// One RK4 step of Xhat' = Xhat (V - Delta) with the measurement held fixed
/// over the step; rotation reprojected afterwards. The switch index flows
/// unchanged. (The simulator integrates the coupled plant/observer system
/// with stage-consistent measurements; this entry point serves component use
/// where the truth is stationary over the step.)
inline ObserverState observer_flow(const ObserverState& state, const SlamTangent& twist,
                                   const CameraMeasurement& meas, const SensorModel& model,
                                   double dt) {
  if (dt <= 0.0) throw std::invalid_argument("observer_flow: dt must be positive");
  const int n = state.xhat.landmark_count();

  auto deriv = [&](const SlamElement& xh) {
    const SlamTangent delta = correction(meas, xh, model);
    SlamTangent rhs(twist.omega - delta.omega, twist.vel - delta.vel,
                    Matrix3Xd(twist.xi - delta.xi));
    // Xdot = X * rhs, expanded block-wise.
    const Matrix3d r = xh.rot.matrix();
    struct D {
      Matrix3d rdot;
      Vector3d pdot;
      Matrix3Xd etadot;
    };
    return D{Matrix3d(r * hat(rhs.omega)), Vector3d(r * rhs.vel), Matrix3Xd(r * rhs.xi)};
  };

  auto advance = [&](const SlamElement& x, const auto& d, double h) {
    return SlamElement(Rotation(Matrix3d(x.rot.matrix() + h * d.rdot)),
                       Vector3d(x.pos + h * d.pdot), Matrix3Xd(x.landmarks + h * d.etadot));
  };

  const SlamElement& x0 = state.xhat;
  const auto k1 = deriv(x0);
  const auto k2 = deriv(advance(x0, k1, 0.5 * dt));
  const auto k3 = deriv(advance(x0, k2, 0.5 * dt));
  const auto k4 = deriv(advance(x0, k3, dt));

  SlamElement xn(
      Rotation(Matrix3d(x0.rot.matrix() +
                        dt / 6.0 * (k1.rdot + 2.0 * k2.rdot + 2.0 * k3.rdot + k4.rdot))),
      Vector3d(x0.pos + dt / 6.0 * (k1.pdot + 2.0 * k2.pdot + 2.0 * k3.pdot + k4.pdot)),
      Matrix3Xd(x0.landmarks +
                dt / 6.0 * (k1.etadot + 2.0 * k2.etadot + 2.0 * k3.etadot + k4.etadot)));
  xn.rot = Rotation::projected(xn.rot.matrix());
  (void)n;
  return {xn, state.q};
}

/// Right-invariant estimation error X Xhat^{-1} (monitor/test use only).
inline SlamElement estimation_error(const SlamElement& truth, const ObserverState& state) {
  return truth * state.xhat.inverse();
}

}  // namespace slamarm

#endif  // SLAMARM_OBSERVER_HPP
