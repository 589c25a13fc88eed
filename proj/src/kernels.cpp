#include "vlamax/kernels.hpp"

#include <cmath>
#include <numbers>

#include "vlamax/quadrature.hpp"

namespace vlamax {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double k4Pi = 4.0 * std::numbers::pi;

double checked(double den) {
  if (std::abs(den) < Tol::degenerate) throw DegenerateKernel("kernel: degenerate denominator");
  return den;
}
}  // namespace

Vec3 kernel_alpha0(double t, const Vec3& x, const Vec3& xi) {
  const Vec3 v = velocity(xi);
  const double den = checked(t - v.dot(x));
  return (x - t * v) / den;
}

Vec3 kernel_alpha_minus1(double t, const Vec3& x, const Vec3& xi) {
  const Vec3 v = velocity(xi);
  const double den = checked(t - v.dot(x));
  return (1.0 - v.squaredNorm()) * (x - t * v) / (den * den);
}

Mat3 kernel_grad_alpha0(double t, const Vec3& x, const Vec3& xi) {
  const Vec3 v = velocity(xi);
  const double den = checked(t - v.dot(x));
  const double g = lorentz_gamma(xi);
  const Vec3 a = x - t * v;
  const Vec3 b = x - v.dot(x) * v;
  // entry (i,j) = d alpha0^i / d xi_j
  Mat3 M = t * den * (v * v.transpose() - Mat3::Identity()) + a * b.transpose();
  return M / (g * den * den);
}

Vec3 kernel_k(const Vec3& x, const Vec3& xi) {
  const double r = x.norm();
  if (r < Tol::degenerate) throw DegenerateKernel("kernel_k: |x| below threshold");
  const Vec3 v = velocity(xi);
  const Vec3 n = x / r;
  const double q = 1.0 - v.dot(n);
  return (1.0 - v.squaredNorm()) * (n - v) / (k4Pi * q * q * q * r * r);
}

Mat3 radiation_matrix(const Vec3& n, const Vec3& v) {
  const double vn = v.dot(n);
  const double q = 1.0 - vn;
  const double ginv = std::sqrt(1.0 - v.squaredNorm());
  Mat3 G = q * (v * v.transpose() - Mat3::Identity()) + (n - v) * (n - vn * v).transpose();
  return G * (ginv / (q * q * q * k4Pi));
}

PointField point_field(const RetardedPoint& rp) {
  PointField f;
  const double R = rp.R;
  if (!(R > 0.0)) return f;
  const Vec3& n = rp.n;
  const Vec3& v = rp.v;
  const double q = 1.0 - v.dot(n);
  f.E1 = (1.0 - v.squaredNorm()) * (n - v) / (k4Pi * q * q * q * R * R);
  f.B1 = n.cross(f.E1);
  f.E2 = radiation_matrix(n, v) * rp.K / R;
  f.B2 = n.cross(f.E2);
  return f;
}

Vec3 kernel_k_present(const Vec3& X, const Vec3& v) {
  const double x2 = X.squaredNorm();
  const double c = X.cross(v).squaredNorm();
  const double q = x2 - c;
  return (1.0 - v.squaredNorm()) * X / (k4Pi * q * std::sqrt(q));
}

double retarded_distance_present(const Vec3& X, const Vec3& v) {
  const double xv = X.dot(v);
  const double g2 = 1.0 - v.squaredNorm();
  return (xv + std::sqrt(xv * xv + g2 * X.squaredNorm())) / g2;
}

void radiation_present_unit(const Vec3& w, const Vec3& v, Mat3& A, Mat3& Bm) {
  const double R = retarded_distance_present(w, v);
  const Vec3 n = (w + R * v) / R;
  A = radiation_matrix(n, v) / R;
  Mat3 nx;
  nx << 0, -n.z(), n.y(), n.z(), 0, -n.x(), -n.y(), n.x(), 0;
  Bm = nx * A;
}

void radiation_present(const Vec3& X, const Vec3& v, Mat3& A, Mat3& Bm) {
  const double d = X.norm();
  radiation_present_unit(X / d, v, A, Bm);
  A /= d;
  Bm /= d;
}

void shock_kernel(const RadialMollifier& m, double t, const Vec3& X, const Vec3& v, Vec3& hE, Vec3& hB,
                  int order) {
  hE.setZero();
  hB.setZero();
  if (!(t > 0.0)) return;
  const double Rm = m.radius();
  const double d = X.norm();
  if (d >= t + Rm || d <= t - Rm) return;
  Vec3 e1, e2, e3;
  double cmin = -1.0;
  if (d > 1e-12 * Rm) {
    e1 = X / d;
    cmin = std::max(-1.0, (d * d + t * t - Rm * Rm) / (2.0 * t * d));
  } else {
    e1 = Vec3(0, 0, 1);
  }
  if (cmin >= 1.0) return;
  const double v1 = v.dot(e1);
  const Vec3 vp = v - v1 * e1;
  const double b0 = vp.norm();
  if (b0 > 1e-15) {
    e2 = vp / b0;
    e3 = e1.cross(e2);
  } else {
    orthonormal_complement(e1, e2, e3);
  }
  const Rule1D& r = gauss_legendre(order);
  const double hc = 0.5 * (1.0 - cmin), mc = 0.5 * (1.0 + cmin);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;  // e1, e2 parts of E and e3 part of B
  double sv = 0.0;                      // coefficient of -v
  for (int k = 0; k < r.size(); ++k) {
    const double c = mc + hc * r.x[k];
    const double arg2 = d * d + t * t - 2.0 * t * d * c;
    const double w = m.value(std::sqrt(std::max(0.0, arg2))) * r.w[k];
    if (w == 0.0) continue;
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double a = v1 * c, b = b0 * s;
    const double oma = 1.0 - a;
    const double I0 = 2.0 * kPi / std::sqrt(oma * oma - b * b);
    double I1;
    if (b > 1e-4 * oma) {
      I1 = (oma * I0 - 2.0 * kPi) / b;
    } else {
      const double z = b / oma;
      I1 = kPi * z / oma * (1.0 + 0.75 * z * z);
    }
    s1 += w * c * I0;
    s2 += w * s * I1;
    sv += w * I0;
    s3 += w * (c * I0 * b0 - s * I1 * v1);
  }
  const double pre = t / (4.0 * kPi) * hc;
  hE = pre * (s1 * e1 + s2 * e2 - sv * v);
  hB = -pre * s3 * e3;
}

Vec3 kirchhoff_coulomb(const RadialMollifier& m, double t, const Vec3& X) {
  const double d = X.norm();
  if (d < 1e-12 * m.radius()) return Vec3::Zero();
  const double q = t > 0.0 ? m.ball_fraction(d, t) : m.mass_within(d);
  return q / (k4Pi * d * d * d) * X;
}

Vec3 smoothed_coulomb(const RadialMollifier& m, const Vec3& X) {
  const double d = X.norm();
  if (d < 1e-12 * m.radius()) return Vec3::Zero();
  return m.coulomb(d) / d * X;
}

}  // namespace vlamax
