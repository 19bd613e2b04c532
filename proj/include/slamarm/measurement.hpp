// slamarm - landmark catalog and range/bearing camera measurements
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_MEASUREMENT_HPP
#define SLAMARM_MEASUREMENT_HPP

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "slamarm/lie.hpp"

namespace slamarm {

/// Stationary landmark layout. `mapped` landmarks have unknown inertial
/// positions that the observer estimates; `anchors` are surveyed markers
/// whose inertial positions are known to the observer. Without anchors the
/// catalog pins neither the inertial attitude nor a common translation
/// (the measurements are invariant under a left rigid shift of the whole
/// estimate), so convergence to the identity error needs >= 4 non-coplanar
/// anchors.
struct LandmarkMap {
  std::vector<Vector3d> mapped;
  std::vector<Vector3d> anchors;

  int mapped_count() const { return static_cast<int>(mapped.size()); }
  int anchor_count() const { return static_cast<int>(anchors.size()); }
  int total() const { return mapped_count() + anchor_count(); }

  Matrix3Xd mapped_matrix() const {
    Matrix3Xd m(3, mapped_count());
    for (int i = 0; i < mapped_count(); ++i) m.col(i) = mapped[i];
    return m;
  }

  /// Smallest singular value of the centered landmark stack (all landmarks).
  double coplanarity_margin() const {
    const int t = total();
    if (t == 0) return 0.0;
    Matrix3Xd all(3, t);
    for (int i = 0; i < mapped_count(); ++i) all.col(i) = mapped[i];
    for (int i = 0; i < anchor_count(); ++i) all.col(mapped_count() + i) = anchors[i];
    const Vector3d c = all.rowwise().mean();
    all.colwise() -= c;
    Eigen::JacobiSVD<Matrix3Xd> svd(all);
    return svd.singularValues().minCoeff();
  }

  void validate() const {
    if (total() < 4) throw std::invalid_argument("LandmarkMap: need at least 4 landmarks");
    if (coplanarity_margin() <= 1e-6) {
      throw std::invalid_argument("LandmarkMap: landmarks are coplanar");
    }
  }
};

/// Constant reference vectors of the measurement model, one per catalog
/// entry (dimension n+4, n = mapped count). Mapped landmark i uses
/// [0; 1; -e_i]; anchor m uses [position; 1; 0].
inline std::vector<VectorXd> reference_vectors(const LandmarkMap& map) {
  const int n = map.mapped_count();
  std::vector<VectorXd> rs;
  rs.reserve(map.total());
  for (int i = 0; i < n; ++i) {
    VectorXd r = VectorXd::Zero(n + 4);
    r(3) = 1.0;
    r(4 + i) = -1.0;
    rs.push_back(r);
  }
  for (int m = 0; m < map.anchor_count(); ++m) {
    VectorXd r = VectorXd::Zero(n + 4);
    r.head<3>() = map.anchors[m];
    r(3) = 1.0;
    rs.push_back(r);
  }
  return rs;
}

/// One synchronized camera frame: beta_i = X^{-1} r_i, whose first three
/// entries are range * bearing in the body frame and whose remaining entries
/// repeat the constant tail of r_i.
struct CameraMeasurement {
  std::vector<VectorXd> beta;

  int count() const { return static_cast<int>(beta.size()); }
};

struct MeasurementNoise {
  bool enabled = false;
  double sigma_range = 0.0;
  double sigma_bearing = 0.0;
};

/// Synthesizes range/bearing measurements from the true state. The truth's
/// landmark block carries the mapped landmark positions (stationary, zero
/// landmark velocity); anchors come from the catalog.
inline CameraMeasurement measure(const SlamElement& truth, const LandmarkMap& map,
                                 const MeasurementNoise& noise = {},
                                 std::mt19937_64* rng = nullptr) {
  const int n = map.mapped_count();
  if (truth.landmark_count() != n) {
    throw std::invalid_argument("measure: truth landmark block does not match map");
  }
  const Matrix3d rt = truth.rot.matrix().transpose();
  std::normal_distribution<double> gauss(0.0, 1.0);

  CameraMeasurement out;
  out.beta.reserve(map.total());
  auto push = [&](const Vector3d& target, int mapped_index) {
    const Vector3d rel = target - truth.pos;
    const double range = rel.norm();
    if (range < 1e-9) {
      throw std::runtime_error("measure: landmark coincides with the camera position");
    }
    Vector3d bearing = rt * rel / range;
    double r = range;
    if (noise.enabled && rng != nullptr) {
      r += noise.sigma_range * gauss(*rng);
      bearing = (bearing + noise.sigma_bearing * Vector3d(gauss(*rng), gauss(*rng), gauss(*rng))).normalized();
    }
    VectorXd b = VectorXd::Zero(n + 4);
    b.head<3>() = r * bearing;
    b(3) = 1.0;
    if (mapped_index >= 0) b(4 + mapped_index) = -1.0;
    out.beta.push_back(b);
  };

  for (int i = 0; i < n; ++i) push(truth.landmarks.col(i), i);
  for (int m = 0; m < map.anchor_count(); ++m) push(map.anchors[m], -1);
  return out;
}

}  // namespace slamarm

#endif  // SLAMARM_MEASUREMENT_HPP
