#include "vlamax/form_factor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlamax/quadrature.hpp"

namespace vlamax {

namespace {
constexpr double kPi = std::numbers::pi;

double bump(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// integral of f over [a,b] split into panels
template <class F>
double panels(double a, double b, int np, int order, F&& f) {
  const Rule1D& r = gauss_legendre(order);
  double acc = 0.0;
  const double h = (b - a) / np;
  for (int p = 0; p < np; ++p) acc += integrate_gl(r, a + p * h, a + (p + 1) * h, f);
  return acc;
}

template <class T, class G>
T ball_quadrature(const Vec3& x, double R, const Vec3& s, int n, G&& g, T acc) {
  const Vec3 a = x - s;
  const double da = a.norm();
  const Vec3 axis = da > 0.0 ? Vec3(a / da) : Vec3(0, 0, 1);
  Vec3 e1, e2;
  orthonormal_complement(axis, e1, e2);
  const double cmin = da > R ? std::sqrt(1.0 - (R * R) / (da * da)) : -1.0;
  const Rule1D& rc = gauss_legendre(n);
  const Rule1D& rr = gauss_legendre(n);
  const int nphi = 2 * n;
  const double wphi = 2.0 * kPi / nphi;
  const double hc = 0.5 * (1.0 - cmin), mc = 0.5 * (1.0 + cmin);
  for (int ic = 0; ic < n; ++ic) {
    const double c = mc + hc * rc.x[ic];
    const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int ip = 0; ip < nphi; ++ip) {
      const double ph = (ip + 0.5) * wphi;
      const Vec3 w = c * axis + st * (std::cos(ph) * e1 + std::sin(ph) * e2);
      const double b = w.dot(a);
      const double disc = b * b - da * da + R * R;
      if (disc <= 0.0) continue;
      const double sq = std::sqrt(disc);
      const double r1 = std::max(0.0, b - sq), r2 = b + sq;
      if (r2 <= r1) continue;
      const double hr = 0.5 * (r2 - r1), mr = 0.5 * (r2 + r1);
      const double wdir = rc.w[ic] * hc * wphi * hr;
      for (int ir = 0; ir < n; ++ir) {
        const double rho = mr + hr * rr.x[ir];
        acc += (wdir * rr.w[ir] * rho * rho) * g(Vec3(s + rho * w));
      }
    }
  }
  return acc;
}

template <class T>
double rel_change(const T& a, const T& b) {
  const double na = a.norm(), nb = b.norm();
  const double scale = std::max(na, nb);
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}
}  // namespace

void orthonormal_complement(const Vec3& a, Vec3& e1, Vec3& e2) {
  const Vec3 t = std::abs(a.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  e1 = (t - t.dot(a) * a).normalized();
  e2 = a.cross(e1);
}

FormFactor::FormFactor() : norm_(1.0) {
  const double z = panels(0.0, 1.0, 8, 64, [](double s) { return 4.0 * kPi * s * s * bump(s); });
  norm_ = 1.0 / z;
}

double FormFactor::operator()(double s) const { return norm_ * bump(std::abs(s)); }

double FormFactor::derivative(double s) const {
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  return norm_ * bump(s) * (-2.0 * s / (q * q));
}

FormFactor make_standard_profile() { return FormFactor(); }

RescaledFormFactor::RescaledFormFactor(FormFactor base, double r) : base_(base), r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("form factor radius must be positive");
}

Vec3 RescaledFormFactor::gradient(const Vec3& x) const {
  const double u = x.norm();
  if (u == 0.0 || u >= r_) return Vec3::Zero();
  const double r4 = r_ * r_ * r_ * r_;
  return (base_.derivative(u / r_) / r4) * (x / u);
}

RescaledFormFactor rescale(const FormFactor& chi, long N, double gamma, bool strict) {
  if (N < 1) throw std::invalid_argument("rescale: N must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("rescale: gamma must be positive");
  if (strict && gamma >= 1.0 / 12.0)
    throw StrictModeError("gamma >= 1/12 is outside the convergence regime (strict mode)");
  return RescaledFormFactor(chi, std::pow(static_cast<double>(N), -gamma));
}

RadialMollifier RadialMollifier::single(const RescaledFormFactor& chi, int n) {
  RadialMollifier m;
  m.R_ = chi.r();
  m.h_ = m.R_ / (n - 1);
  m.f_.resize(n);
  m.m_.resize(n);
  const Rule1D& g = gauss_legendre(10);
  m.m_[0] = 0.0;
  for (int k = 0; k < n; ++k) {
    m.f_[k] = chi(k * m.h_);
    if (k > 0)
      m.m_[k] = m.m_[k - 1] + integrate_gl(g, (k - 1) * m.h_, k * m.h_,
                                           [&](double u) { return 4.0 * kPi * u * u * chi(u); });
  }
  return m;
}

RadialMollifier RadialMollifier::doubled(const RescaledFormFactor& chi, int n) {
  const double r = chi.r();
  // G(w) = int_0^w chi(s) s ds on a fine grid
  const int ng = 8193;
  const double hg = r / (ng - 1);
  std::vector<double> G(ng + 2, 0.0);
  const Rule1D& g10 = gauss_legendre(10);
  for (int k = 1; k < ng; ++k)
    G[k] = G[k - 1] + integrate_gl(g10, (k - 1) * hg, k * hg, [&](double s) { return chi(s) * s; });
  G[ng] = G[ng + 1] = G[ng - 1];
  auto Gat = [&](double w) {
    if (w <= 0.0) return 0.0;
    if (w >= r) return G[ng - 1];
    const double q = w / hg;
    int k = static_cast<int>(q);
    if (k > ng - 2) k = ng - 2;
    const double t = q - k;
    // cubic Lagrange on k-1..k+2, G odd-extended below zero
    const double gm = k > 0 ? G[k - 1] : -G[1];
    const double g0 = G[k], g1 = G[k + 1], g2 = G[k + 2];
    return g0 + 0.5 * t * (g1 - gm + t * (2.0 * gm - 5.0 * g0 + 4.0 * g1 - g2 + t * (3.0 * (g0 - g1) + g2 - gm)));
  };
  RadialMollifier m;
  m.doubled_ = true;
  m.R_ = 2.0 * r;
  m.h_ = m.R_ / (n - 1);
  m.f_.resize(n);
  m.m_.resize(n);
  const Rule1D& g = gauss_legendre(40);
  const double psi0 = panels(0.0, r, 8, 32, [&](double a) { return 4.0 * kPi * a * a * chi(a) * chi(a); });
  for (int k = 0; k < n; ++k) {
    const double u = k * m.h_;
    if (k == 0) {
      m.f_[k] = psi0;
      continue;
    }
    double brk[4] = {0.0, std::min(u, r), std::clamp(r - u, 0.0, r), r};
    std::sort(brk, brk + 4);
    double acc = 0.0;
    for (int p = 0; p < 3; ++p) {
      if (brk[p + 1] - brk[p] <= 0.0) continue;
      acc += integrate_gl(g, brk[p], brk[p + 1], [&](double a) {
        return chi(a) * a * (Gat(std::min(u + a, r)) - Gat(std::min(std::abs(u - a), r)));
      });
    }
    m.f_[k] = 2.0 * kPi * acc / u;
  }
  m.f_[n - 1] = 0.0;
  m.m_[0] = 0.0;
  for (int k = 1; k < n; ++k)
    m.m_[k] = m.m_[k - 1] + integrate_gl(g10, (k - 1) * m.h_, k * m.h_, [&](double u) {
                return 4.0 * kPi * u * u * m.value(u);
              });
  return m;
}

double RadialMollifier::lookup(const std::vector<double>& tab, double u) const {
  const int n = static_cast<int>(tab.size());
  const double q = u / h_;
  int k = static_cast<int>(q);
  if (k > n - 2) k = n - 2;
  const double t = q - k;
  const bool mass = &tab == &m_;
  const double gm = k > 0 ? tab[k - 1] : (mass ? -tab[1] : tab[1]);
  const double g0 = tab[k], g1 = tab[k + 1];
  const double g2 = k + 2 < n ? tab[k + 2] : (mass ? tab[n - 1] : 0.0);
  return g0 + 0.5 * t * (g1 - gm + t * (2.0 * gm - 5.0 * g0 + 4.0 * g1 - g2 + t * (3.0 * (g0 - g1) + g2 - gm)));
}

double RadialMollifier::value(double u) const {
  u = std::abs(u);
  if (!(u < R_)) return 0.0;
  return lookup(f_, u);
}

double RadialMollifier::mass_within(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= R_) return m_.back();
  return lookup(m_, u);
}

double RadialMollifier::ball_fraction(double rad, double a) const {
  if (rad <= 0.0) return 0.0;
  if (a < 1e-14 * R_) return mass_within(rad);
  if (rad >= a + R_) return m_.back();
  double acc = rad > a ? mass_within(rad - a) : 0.0;
  const double lo = std::abs(rad - a), hi = std::min(rad + a, R_);
  if (hi > lo) {
    const double c0 = rad * rad - a * a;
    acc += integrate_gl(gauss_legendre(24), lo, hi, [&](double u) {
      return kPi * u * value(u) * (2.0 * a * u + c0 - u * u) / a;
    });
  }
  return acc;
}

double RadialMollifier::coulomb(double d) const {
  if (d < 1e-8 * R_) return value(0.0) * d / 3.0;
  return mass_within(d) / (4.0 * kPi * d * d);
}

Vec3 smooth_kernel(const RescaledFormFactor& chi, const std::function<Vec3(const Vec3&)>& h,
                   const Vec3& x, const Vec3& center, double tol, int max_order) {
  auto g = [&](const Vec3& y) -> Vec3 { return chi((x - y).norm()) * h(y); };
  Vec3 prev = ball_quadrature<Vec3>(x, chi.r(), center, 12, g, Vec3::Zero());
  for (int n = 24; n <= max_order; n *= 2) {
    Vec3 cur = ball_quadrature<Vec3>(x, chi.r(), center, n, g, Vec3::Zero());
    if (rel_change(cur, prev) <= tol) return cur;
    prev = cur;
  }
  throw QuadratureError("smooth_kernel: adaptive refinement exceeded budget");
}

Mat3 smooth_kernel_gradient(const RescaledFormFactor& chi,
                            const std::function<Vec3(const Vec3&)>& h, const Vec3& x,
                            const Vec3& center, double tol, int max_order) {
  auto g = [&](const Vec3& y) -> Mat3 { return h(y) * chi.gradient(x - y).transpose(); };
  Mat3 prev = ball_quadrature<Mat3>(x, chi.r(), center, 12, g, Mat3::Zero());
  for (int n = 24; n <= max_order; n *= 2) {
    Mat3 cur = ball_quadrature<Mat3>(x, chi.r(), center, n, g, Mat3::Zero());
    if (rel_change(cur, prev) <= tol) return cur;
    prev = cur;
  }
  throw QuadratureError("smooth_kernel_gradient: adaptive refinement exceeded budget");
}

}  // namespace vlamax
