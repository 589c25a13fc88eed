#pragma once
// Relativistic single-particle kinematics. Units: c = 1, unit mass and charge.

#include <Eigen/Dense>

namespace vlamax {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct PhaseState {
  Vec3 x = Vec3::Zero();
  Vec3 xi = Vec3::Zero();
};

struct FieldSample {
  Vec3 E = Vec3::Zero();
  Vec3 B = Vec3::Zero();
};

// every tolerance used by library code or tests lives here
struct Tol {
  static constexpr double retarded_residual = 1e-10;
  static constexpr double retarded_bracket = 1e-12;
  static constexpr double degenerate = 1e-14;
  static constexpr double kernel_fd = 1e-7;
  static constexpr double closed_form_tret = 1e-9;
  static constexpr double normalization = 1e-8;
  static constexpr double smooth_kernel_rel = 1e-6;
  static constexpr double metric_axioms = 1e-12;
  static constexpr double static_oracle_rel = 1e-3;
  static constexpr double energy_drift_rel = 1e-3;
  static constexpr double zero_deviation_J = 1e-8;
  static constexpr double concentration_slope = -1.0 / 6.0;
  static constexpr double concentration_slope_tol = 0.05;
};

// v(xi) = xi / sqrt(1 + |xi|^2)
inline Vec3 velocity(const Vec3& xi) { return xi / std::sqrt(1.0 + xi.squaredNorm()); }

inline double lorentz_gamma(const Vec3& xi) { return std::sqrt(1.0 + xi.squaredNorm()); }

Mat3 velocity_jacobian(const Vec3& xi);

inline Vec3 lorentz_force(const FieldSample& f, const Vec3& xi) {
  return f.E + velocity(xi).cross(f.B);
}

// momentum from a velocity with |v| < 1
inline Vec3 momentum_from_velocity(const Vec3& v) { return v / std::sqrt(1.0 - v.squaredNorm()); }

}  // namespace vlamax
