#pragma once
// Lienard-Wiechert kernels: alpha^0, alpha^-1, grad_xi alpha^0, k, plus present-position forms.

#include <stdexcept>

#include "vlamax/form_factor.hpp"
#include "vlamax/history.hpp"
#include "vlamax/kinematics.hpp"

namespace vlamax {

struct DegenerateKernel : std::domain_error {
  using std::domain_error::domain_error;
};

Vec3 kernel_alpha0(double t, const Vec3& x, const Vec3& xi);
Vec3 kernel_alpha_minus1(double t, const Vec3& x, const Vec3& xi);
// (i,j) entry = d alpha0^i / d xi_j
Mat3 kernel_grad_alpha0(double t, const Vec3& x, const Vec3& xi);
// relativistic Coulomb kernel (1-v^2)(n-v)/(4 pi (1-v.n)^3 |x|^2)
Vec3 kernel_k(const Vec3& x, const Vec3& xi);

// radiation map: E2 = radiation_matrix(n, v) K / R at retarded distance R
Mat3 radiation_matrix(const Vec3& n, const Vec3& v);

// Uniform-motion fields expressed through the present offset X = x - y(t).
// velocity field, equal to kernel_k at the matching retarded offset
Vec3 kernel_k_present(const Vec3& X, const Vec3& v);
// radiation matrices (E and B = n x E) with frozen velocity and force
void radiation_present(const Vec3& X, const Vec3& v, Mat3& A, Mat3& Bm);
// same on the unit sphere (degree -1 in |X|): A(X) = Ahat(X/|X|)/|X|
void radiation_present_unit(const Vec3& w, const Vec3& v, Mat3& A, Mat3& Bm);
// retarded distance for present offset X under uniform motion
double retarded_distance_present(const Vec3& X, const Vec3& v);

struct PointField {
  Vec3 E1 = Vec3::Zero(), B1 = Vec3::Zero(), E2 = Vec3::Zero(), B2 = Vec3::Zero();
};
// unsmoothed fields of a unit point charge at a (moving-branch) retarded point
PointField point_field(const RetardedPoint& rp);

// Shock term of one initial atom smoothed by m:
//   h(t,X,v)  = (t/4pi) int_{S^2} (w - v)/(1 - v.w) m(X - w t) dw
//   hB(t,X,v) = (t/4pi) int_{S^2} w x (w - v)/(1 - v.w) m(X - w t) dw
void shock_kernel(const RadialMollifier& m, double t, const Vec3& X, const Vec3& v, Vec3& hE, Vec3& hB,
                  int order = 24);

// Kirchhoff evolution of the smoothed Coulomb field of a static unit charge, restricted to
// its not-yet-reached exterior: (m * [Coulomb 1_{|y|>t}])(X)
Vec3 kirchhoff_coulomb(const RadialMollifier& m, double t, const Vec3& X);

// m-smoothed static Coulomb field of a unit charge at offset X
Vec3 smoothed_coulomb(const RadialMollifier& m, const Vec3& X);

}  // namespace vlamax
