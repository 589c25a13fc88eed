#include "vlamax/fields.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "vlamax/quadrature.hpp"

namespace vlamax {

namespace {
constexpr double kPi = std::numbers::pi;
}

FieldMode parse_field_mode(const std::string& s) {
  if (s == "exact") return FieldMode::Exact;
  if (s == "tabulated") return FieldMode::Tabulated;
  throw std::invalid_argument("unknown field mode: " + s);
}

void FieldBreakdown::add(const FieldBreakdown& o, double w) {
  E0 += w * o.E0;
  E0p += w * o.E0p;
  E1 += w * o.E1;
  E2 += w * o.E2;
  B0 += w * o.B0;
  B0p += w * o.B0p;
  B1 += w * o.B1;
  B2 += w * o.B2;
}

FieldEvaluator::FieldEvaluator(const RadialMollifier& m, const FieldOptions& opt) : m_(m), opt_(opt) {
  if (opt_.mode == FieldMode::Tabulated) table_ = kernel_table_for(m_, opt_.table);
}

void FieldEvaluator::initial_terms(const TrajectoryHistory& h, double t, const Vec3& x, FieldBreakdown& f) const {
  const Vec3 X0 = x - h.x(0);
  f.E0 = kirchhoff_coulomb(m_, t, X0);
  if (t > 0.0) {
    Vec3 hE, hB, hE0, hB0;
    shock_kernel(m_, t, X0, h.v(0), hE, hB, opt_.shock_order);
    shock_kernel(m_, t, X0, Vec3::Zero(), hE0, hB0, opt_.shock_order);
    f.E0p = hE - hE0;
    f.B0p = hB - hB0;
  }
}

FieldBreakdown FieldEvaluator::source(const TrajectoryHistory& h, double t, const Vec3& x) const {
  return opt_.mode == FieldMode::Exact ? exact(h, t, x) : tabulated(h, t, x);
}

FieldSample FieldEvaluator::source_total(const TrajectoryHistory& h, double t, const Vec3& x) const {
  const FieldBreakdown f = source(h, t, x);
  return {f.E(), f.B()};
}

// Quadrature of m(|z-x|) * pointfield(z) over the part of the support ball inside the source's
// cone ball |z - y0| < t, in spherical coordinates centred on the present position.
FieldBreakdown FieldEvaluator::exact(const TrajectoryHistory& h, double t, const Vec3& x) const {
  FieldBreakdown f;
  const double R = m_.radius();
  const Vec3 y0 = h.x(0);
  if (!(t > 0.0) || (x - y0).norm() >= t + R) {
    f.E0 = smoothed_coulomb(m_, x - y0);
    return f;
  }
  initial_terms(h, t, x, f);
  const Vec3 p = h.at(t).x;
  const Vec3 a = x - p;
  const double da = a.norm();
  const Vec3 axis = da > 0.0 ? Vec3(a / da) : Vec3(0, 0, 1);
  Vec3 e1, e2;
  orthonormal_complement(axis, e1, e2);
  const double cmin = da > R ? std::sqrt(1.0 - R * R / (da * da)) : -1.0;
  const Vec3 q = p - y0;
  const double q2 = q.squaredNorm();
  const Rule1D& rc = gauss_legendre(opt_.exact_c);
  const Rule1D& rr = gauss_legendre(opt_.exact_rho);
  const int nphi = opt_.exact_phi;
  const double wphi = 2.0 * kPi / nphi;
  const double hc = 0.5 * (1.0 - cmin), mc = 0.5 * (1.0 + cmin);
  for (int ic = 0; ic < rc.size(); ++ic) {
    const double c = mc + hc * rc.x[ic];
    const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int ip = 0; ip < nphi; ++ip) {
      const double ph = (ip + 0.5) * wphi;
      const Vec3 w = c * axis + st * (std::cos(ph) * e1 + std::sin(ph) * e2);
      const double b = w.dot(a);
      const double disc = b * b - da * da + R * R;
      if (disc <= 0.0) continue;
      const double sq = std::sqrt(disc);
      const double lo = std::max(0.0, b - sq);
      const double bq = w.dot(q);
      const double rc_cone = -bq + std::sqrt(std::max(0.0, bq * bq - q2 + t * t));
      const double hi = std::min(b + sq, rc_cone);
      if (hi <= lo) continue;
      const double hr = 0.5 * (hi - lo), mr = 0.5 * (hi + lo);
      const double wdir = rc.w[ic] * hc * wphi * hr;
      for (int ir = 0; ir < rr.size(); ++ir) {
        const double rho = mr + hr * rr.x[ir];
        const Vec3 z = p + rho * w;
        const double mw = m_.value((z - x).norm());
        if (mw == 0.0) continue;
        const auto rp = retarded_time(h, t, z);
        if (!rp) continue;
        const PointField pf = point_field(*rp);
        const double ww = wdir * rr.w[ir] * rho * rho * mw;
        f.E1 += ww * pf.E1;
        f.B1 += ww * pf.B1;
        f.E2 += ww * pf.E2;
        f.B2 += ww * pf.B2;
      }
    }
  }
  return f;
}

// Frozen retarded state at the evaluation centre, uniform-motion extrapolation to the present
// position p = y(t_ret) + v R, cone indicator replaced by the mollifier mass inside the cone ball.
FieldBreakdown FieldEvaluator::tabulated(const TrajectoryHistory& h, double t, const Vec3& x) const {
  FieldBreakdown f;
  const Vec3 y0 = h.x(0);
  const Vec3 X0 = x - y0;
  const double d0 = X0.norm();
  const double R = m_.radius();
  if (!(t > 0.0) || d0 >= t + R) {
    f.E0 = smoothed_coulomb(m_, X0);
    return f;
  }
  initial_terms(h, t, x, f);
  const double phi = m_.ball_fraction(t, d0);
  if (phi <= 0.0) return f;
  Vec3 p, v, K;
  if (auto rp = retarded_time(h, t, x)) {
    p = rp->y + rp->R * rp->v;
    v = rp->v;
    K = rp->K;
  } else {
    v = h.v(0);
    p = y0 + t * v;
    K = h.K(0);
  }
  const SmoothedKernels sk = table_->lookup(x - p, v);
  f.E1 = phi * sk.E1 + (1.0 - phi) * smoothed_coulomb(m_, X0) - f.E0;
  f.B1 = phi * v.cross(sk.E1);
  f.E2 = phi * (sk.A * K);
  f.B2 = phi * (sk.Bm * K);
  return f;
}

FieldBreakdown field_total(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x) {
  FieldBreakdown f;
  for (int i = 0; i < ens.size(); ++i) f.add(ev.source((*ens.hist)[i], t, x), ens.weight);
  return f;
}

FieldSample field_sample(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x, int skip) {
  FieldSample s;
  for (int i = 0; i < ens.size(); ++i) {
    if (i == skip) continue;
    const FieldBreakdown f = ev.source((*ens.hist)[i], t, x);
    s.E += ens.weight * f.E();
    s.B += ens.weight * f.B();
  }
  return s;
}

std::pair<Vec3, Vec3> field_E1_B1(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x) {
  const FieldBreakdown f = field_total(ens, ev, t, x);
  return {f.E1, f.B1};
}

std::pair<Vec3, Vec3> field_E2_B2(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x) {
  const FieldBreakdown f = field_total(ens, ev, t, x);
  return {f.E2, f.B2};
}

std::pair<Vec3, Vec3> field_E0prime_B0prime(const SourceEnsemble& ens, const FieldEvaluator& ev, double t,
                                            const Vec3& x) {
  const FieldBreakdown f = field_total(ens, ev, t, x);
  return {f.E0p, f.B0p};
}

Vec3 field_E0(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x) {
  return field_total(ens, ev, t, x).E0;
}

void write_field_slice_csv(const std::string& path, const SourceEnsemble& ens, const FieldEvaluator& ev,
                           double t, const std::vector<Vec3>& points) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,x,y,z";
  for (const char* c : {"E0", "E0p", "E1", "E2", "B0", "B0p", "B1", "B2", "E", "B"})
    os << ',' << c << "_x," << c << "_y," << c << "_z";
  os << '\n' << std::setprecision(17);
  for (const Vec3& x : points) {
    const FieldBreakdown f = field_total(ens, ev, t, x);
    os << t << ',' << x.x() << ',' << x.y() << ',' << x.z();
    for (const Vec3& c : {f.E0, f.E0p, f.E1, f.E2, f.B0, f.B0p, f.B1, f.B2, f.E(), f.B()})
      os << ',' << c.x() << ',' << c.y() << ',' << c.z();
    os << '\n';
  }
}

}  // namespace vlamax
