#pragma once
// Form factor chi, its rescaling chi^N, radial mollifier tables and chi^N * h quadrature.

#include <functional>
#include <stdexcept>
#include <vector>

#include "vlamax/kinematics.hpp"

namespace vlamax {

struct StrictModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// radial bump exp(-1/(1-s^2)) on s < 1, normalized so that its integral over R^3 is 1
class FormFactor {
 public:
  FormFactor();
  double operator()(double s) const;
  double derivative(double s) const;  // d/ds of the normalized profile
  double sup() const { return (*this)(0.0); }
  double normalization() const { return norm_; }

 private:
  double norm_;
};

FormFactor make_standard_profile();

class RescaledFormFactor {
 public:
  RescaledFormFactor(FormFactor base, double r);
  double r() const { return r_; }
  const FormFactor& base() const { return base_; }
  double operator()(double u) const { return base_(u / r_) / (r_ * r_ * r_); }
  double operator()(const Vec3& x) const { return (*this)(x.norm()); }
  Vec3 gradient(const Vec3& x) const;
  double sup() const { return base_.sup() / (r_ * r_ * r_); }

 private:
  FormFactor base_;
  double r_;
};

// r_N = N^-gamma; strict mode enforces gamma < 1/12
RescaledFormFactor rescale(const FormFactor& chi, long N, double gamma, bool strict = false);

// Tabulated radial function m(|x|) with support radius R: chi^N or psi = chi^N * chi^N.
class RadialMollifier {
 public:
  static RadialMollifier single(const RescaledFormFactor& chi, int n = 4097);
  static RadialMollifier doubled(const RescaledFormFactor& chi, int n = 4097);

  double radius() const { return R_; }
  double value(double u) const;
  // integral of m over the ball |y| < u
  double mass_within(double u) const;
  // mass of m centred at distance a from the origin lying inside the ball of radius rad
  double ball_fraction(double rad, double a) const;
  // radial Coulomb field of the smoothed unit charge, magnitude M(d)/(4 pi d^2)
  double coulomb(double d) const;
  bool is_double() const { return doubled_; }

 private:
  double lookup(const std::vector<double>& tab, double u) const;
  double R_ = 1.0, h_ = 1.0;
  bool doubled_ = false;
  std::vector<double> f_, m_;
};

// (chi^N * h)(x) by spherical product quadrature centred on `center` (the singular point of h,
// default origin). Adaptive doubling until relative change < tol.
Vec3 smooth_kernel(const RescaledFormFactor& chi, const std::function<Vec3(const Vec3&)>& h,
                   const Vec3& x, const Vec3& center = Vec3::Zero(),
                   double tol = Tol::smooth_kernel_rel, int max_order = 160);

// grad_x (chi^N * h)(x); column k is the derivative along e_k
Mat3 smooth_kernel_gradient(const RescaledFormFactor& chi,
                            const std::function<Vec3(const Vec3&)>& h, const Vec3& x,
                            const Vec3& center = Vec3::Zero(), double tol = Tol::smooth_kernel_rel,
                            int max_order = 160);

// orthonormal pair completing a unit vector
void orthonormal_complement(const Vec3& a, Vec3& e1, Vec3& e2);

}  // namespace vlamax
