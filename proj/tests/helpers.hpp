// slamarm - shared test fixtures: random group sampling and oracle utilities
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_TESTS_HELPERS_HPP
#define SLAMARM_TESTS_HELPERS_HPP

#include <random>

#include "slamarm/lie.hpp"
#include "slamarm/measurement.hpp"

namespace slamarm::testing {

// corrected relative error: small absolute deviations are ignored
inline double relative_error(double actual, double expected, double atol = 1e-12) {
  const double num = std::max(0.0, std::abs(actual - expected) - atol);
  return num / (std::abs(actual) + std::abs(expected) + atol);
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double gauss(double sigma = 1.0) {
    return std::normal_distribution<double>(0.0, sigma)(rng_);
  }
  Vector3d vec3(double scale = 1.0) {
    return scale * Vector3d(gauss(), gauss(), gauss());
  }
  Vector6d vec6(double scale = 1.0) {
    Vector6d v;
    for (int i = 0; i < 6; ++i) v(i) = scale * gauss();
    return v;
  }
  Vector3d unit3() {
    Vector3d v = vec3();
    while (v.norm() < 1e-6) v = vec3();
    return v.normalized();
  }
  Matrix3d rotation() { return rodrigues(uniform(0.0, M_PI), unit3()); }

  SlamElement slam(int n, double scale = 1.0) {
    Matrix3Xd eta(3, n);
    for (int i = 0; i < n; ++i) eta.col(i) = vec3(scale);
    return SlamElement(Rotation(rotation()), vec3(scale), eta);
  }
  SlamTangent slam_tangent(int n, double scale = 1.0) {
    Matrix3Xd xi(3, n);
    for (int i = 0; i < n; ++i) xi.col(i) = vec3(scale);
    return SlamTangent(vec3(scale), vec3(scale), xi);
  }
  RigidPose pose(double scale = 1.0) { return RigidPose(Rotation(rotation()), vec3(scale)); }
  Twist twist(double scale = 1.0) { return Twist(vec3(scale), vec3(scale)); }

  /// Random catalog with n mapped landmarks and a few anchors; positions are
  /// kept away from the origin so measurements never degenerate.
  LandmarkMap map(int n_mapped, int n_anchors, double scale = 3.0) {
    LandmarkMap m;
    auto off_origin = [&]() {
      Vector3d p = vec3(scale);
      while (p.norm() < 0.5) p = vec3(scale);
      return p;
    };
    for (int i = 0; i < n_mapped; ++i) m.mapped.push_back(off_origin());
    for (int i = 0; i < n_anchors; ++i) m.anchors.push_back(off_origin());
    return m;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Truncated exponential series, the independent oracle for the closed-form
/// exponentials (50 terms).
inline MatrixXd exp_series(const MatrixXd& a, int terms = 50) {
  MatrixXd out = MatrixXd::Identity(a.rows(), a.cols());
  MatrixXd term = out;
  for (int k = 1; k <= terms; ++k) {
    term = term * a / static_cast<double>(k);
    out += term;
  }
  return out;
}

}  // namespace slamarm::testing

#endif  // SLAMARM_TESTS_HELPERS_HPP
