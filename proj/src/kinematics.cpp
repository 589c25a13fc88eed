#include "vlamax/kinematics.hpp"

namespace vlamax {

Mat3 velocity_jacobian(const Vec3& xi) {
  const double g2 = 1.0 + xi.squaredNorm();
  const double g = std::sqrt(g2);
  return Mat3::Identity() / g - xi * xi.transpose() / (g2 * g);
}

}  // namespace vlamax
