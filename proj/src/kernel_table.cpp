#include "vlamax/kernel_table.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "vlamax/kernels.hpp"
#include "vlamax/quadrature.hpp"

namespace vlamax {

namespace {
constexpr double kPi = std::numbers::pi;
}

KernelTable::KernelTable(const RadialMollifier& m, const KernelTableOptions& opt) : m_(m), opt_(opt) {
  d_max_ = opt.d_max_factor * m.radius();
  dd_ = d_max_ / (opt.n_d - 1);
  ds_ = opt.s_max / (opt.n_s - 1);
  dmu_ = 2.0 / (opt.n_mu - 1);
  tab_.assign(static_cast<size_t>(opt.n_d) * opt.n_s * opt.n_mu * kComps, 0.0);
  for (int i = 0; i < opt.n_d; ++i) {
    const double d = i * dd_;
    const double k0 = m.coulomb(d);
    for (int j = 0; j < opt.n_s; ++j) {
      for (int k = 0; k < opt.n_mu; ++k) {
        const double mu = std::clamp(-1.0 + k * dmu_, -1.0, 1.0);
        const SmoothedKernels s = direct(d, j * ds_, mu, opt.sphere_c, opt.sphere_phi, opt.radial);
        double* c = &tab_[((static_cast<size_t>(i) * opt.n_s + j) * opt.n_mu + k) * kComps];
        c[0] = s.E1.x() - k0;
        c[1] = s.E1.y();
        c[2] = s.A(0, 0);
        c[3] = s.A(0, 1);
        c[4] = s.A(1, 0);
        c[5] = s.A(1, 1);
        c[6] = s.A(2, 2);
        c[7] = s.Bm(0, 2);
        c[8] = s.Bm(1, 2);
        c[9] = s.Bm(2, 0);
        c[10] = s.Bm(2, 1);
      }
    }
  }
}

// Local frame: X = d e1, v = s (mu e1 + sqrt(1-mu^2) e2). Directions w are taken around e1
// from the singular point X - w rho = 0; the ray integral of m carries the |X|-dependence.
SmoothedKernels KernelTable::direct(double d, double s, double mu, int nc, int nphi, int nr) const {
  const double R = m_.radius();
  const Vec3 v(s * mu, s * std::sqrt(std::max(0.0, 1.0 - mu * mu)), 0.0);
  const double cmin = d > R ? std::sqrt(1.0 - R * R / (d * d)) : -1.0;
  const Rule1D& rc = gauss_legendre(nc);
  const Rule1D& rr = gauss_legendre(nr);
  const int nh = nphi / 2;  // integrands used are even in phi
  const double wphi = 2.0 * kPi / nh;
  const double hc = 0.5 * (1.0 - cmin), mc = 0.5 * (1.0 + cmin);
  SmoothedKernels out{Vec3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int ic = 0; ic < nc; ++ic) {
    const double c = mc + hc * rc.x[ic];
    // ray integrals L0 = int m dr, L1 = int m r dr along X + ... (|X - r w|)
    const double disc = R * R - d * d * (1.0 - c * c);
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double r1 = std::max(0.0, d * c - sq), r2 = d * c + sq;
    if (r2 <= r1) continue;
    const double hr = 0.5 * (r2 - r1), mr = 0.5 * (r2 + r1);
    double L0 = 0.0, L1 = 0.0;
    for (int ir = 0; ir < nr; ++ir) {
      const double rho = mr + hr * rr.x[ir];
      const double val = m_.value(std::sqrt(std::max(0.0, rho * rho - 2.0 * rho * d * c + d * d))) * rr.w[ir];
      L0 += val;
      L1 += val * rho;
    }
    L0 *= hr;
    L1 *= hr;
    const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double wc = rc.w[ic] * hc * wphi;
    for (int ip = 0; ip < nh; ++ip) {
      const double ph = (ip + 0.5) * kPi / nh;
      const Vec3 w(c, st * std::cos(ph), st * std::sin(ph));
      out.E1 += (wc * L0) * kernel_k_present(w, v);
      Mat3 A, Bm;
      radiation_present_unit(w, v, A, Bm);
      out.A += (wc * L1) * A;
      out.Bm += (wc * L1) * Bm;
    }
  }
  // symmetrize the half-circle sum: components odd under e3 -> -e3 vanish
  out.E1.z() = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const bool odd = (a == 2) != (b == 2);
      if (odd)
        out.A(a, b) = 0.0;
      else
        out.Bm(a, b) = 0.0;
    }
  return out;
}

SmoothedKernels KernelTable::lookup(const Vec3& X, const Vec3& v) const {
  SmoothedKernels out;
  const double d = X.norm();
  if (d >= d_max_) {
    out.E1 = kernel_k_present(X, v);
    radiation_present(X, v, out.A, out.Bm);
    return out;
  }
  double s = v.norm();
  Vec3 e1, e2, e3;
  if (d > 1e-12 * d_max_)
    e1 = X / d;
  else if (s > 0.0)
    e1 = v / s;
  else
    e1 = Vec3(1, 0, 0);
  const double v1 = v.dot(e1);
  const Vec3 vp = v - v1 * e1;
  const double vpn = vp.norm();
  if (vpn > 1e-14) {
    e2 = vp / vpn;
    e3 = e1.cross(e2);
  } else {
    orthonormal_complement(e1, e2, e3);
  }
  double mu = s > 0.0 ? std::clamp(v1 / s, -1.0, 1.0) : 0.0;
  if (s > opt_.s_max) {
    s = opt_.s_max;
    clamped_.fetch_add(1, std::memory_order_relaxed);
  }
  const double qd = d / dd_, qs = s / ds_, qm = (mu + 1.0) / dmu_;
  int i = std::min(static_cast<int>(qd), opt_.n_d - 2);
  int j = std::min(static_cast<int>(qs), opt_.n_s - 2);
  int k = std::min(static_cast<int>(qm), opt_.n_mu - 2);
  const double fd = qd - i, fs = qs - j, fm = qm - k;
  double c[kComps] = {0};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e) {
        const double w = (a ? fd : 1 - fd) * (b ? fs : 1 - fs) * (e ? fm : 1 - fm);
        const double* t = &tab_[((static_cast<size_t>(i + a) * opt_.n_s + (j + b)) * opt_.n_mu + (k + e)) * kComps];
        for (int q = 0; q < kComps; ++q) c[q] += w * t[q];
      }
  Mat3 F;
  F.col(0) = e1;
  F.col(1) = e2;
  F.col(2) = e3;
  out.E1 = (m_.coulomb(d) + c[0]) * e1 + c[1] * e2;
  Mat3 L;
  L << c[2], c[3], 0, c[4], c[5], 0, 0, 0, c[6];
  out.A = F * L * F.transpose();
  L << 0, 0, c[7], 0, 0, c[8], c[9], c[10], 0;
  out.Bm = F * L * F.transpose();
  return out;
}

std::shared_ptr<const KernelTable> kernel_table_for(const RadialMollifier& m, const KernelTableOptions& o) {
  using Key = std::tuple<double, bool, int, int, int, double, double, int, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const KernelTable>> cache;
  const Key key{m.radius(), m.is_double(), o.n_d, o.n_s, o.n_mu, o.s_max, o.d_max_factor,
                o.sphere_c, o.sphere_phi, o.radial};
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<const KernelTable>(m, o);
  cache.emplace(key, t);
  return t;
}

}  // namespace vlamax
