#include "vlamax/history.hpp"

#include <cmath>

namespace vlamax {

TrajectoryHistory::TrajectoryHistory(double dt, const Vec3& x0, const Vec3& xi0, const Vec3& K0,
                                     bool static_past)
    : dt_(dt), static_past_(static_past) {
  if (!(dt > 0.0)) throw std::invalid_argument("history step must be positive");
  append(x0, xi0, K0);
}

void TrajectoryHistory::append(const Vec3& x, const Vec3& xi, const Vec3& K) {
  if (!x.allFinite() || !xi.allFinite() || !K.allFinite())
    throw std::invalid_argument("history: non-finite sample");
  x_.push_back(x);
  xi_.push_back(xi);
  K_.push_back(K);
  v_.push_back(velocity(xi));
}

void TrajectoryHistory::set_last_force(const Vec3& K) { K_.back() = K; }

void TrajectoryHistory::truncate(int n) {
  x_.resize(n);
  xi_.resize(n);
  K_.resize(n);
  v_.resize(n);
}

HistoryState TrajectoryHistory::at(double s) const {
  HistoryState st;
  if (s < 0.0) {
    if (static_past_) {
      st.x = x_[0];
      st.xi = st.K = st.v = Vec3::Zero();
    } else {
      // free streaming backward
      st.x = x_[0] + v_[0] * s;
      st.xi = xi_[0];
      st.K = Vec3::Zero();
      st.v = v_[0];
    }
    return st;
  }
  const int n = size();
  const double q = s / dt_;
  if (q >= n - 1) {
    const double tau = s - t_end();
    const Vec3& xi = xi_[n - 1];
    const Vec3& K = K_[n - 1];
    const Vec3 a = velocity_jacobian(xi) * K;
    st.x = x_[n - 1] + tau * v_[n - 1] + 0.5 * tau * tau * a;
    st.xi = xi + tau * K;
    st.K = K;
    st.v = velocity(st.xi);
    return st;
  }
  const int k = static_cast<int>(q);
  const double u = q - k;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u, h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  st.x = h00 * x_[k] + (h10 * dt_) * v_[k] + h01 * x_[k + 1] + (h11 * dt_) * v_[k + 1];
  st.xi = h00 * xi_[k] + (h10 * dt_) * K_[k] + h01 * xi_[k + 1] + (h11 * dt_) * K_[k + 1];
  if (k >= 1 && k + 2 <= n - 1) {
    // cubic Lagrange through samples k-1..k+2 (nodes -1, 0, 1, 2)
    const double l0 = -u * (u - 1) * (u - 2) / 6, l1 = (u + 1) * (u - 1) * (u - 2) / 2;
    const double l2 = -(u + 1) * u * (u - 2) / 2, l3 = (u + 1) * u * (u - 1) / 6;
    st.K = l0 * K_[k - 1] + l1 * K_[k] + l2 * K_[k + 1] + l3 * K_[k + 2];
  } else {
    st.K = (1.0 - u) * K_[k] + u * K_[k + 1];
  }
  st.v = velocity(st.xi);
  return st;
}

Vec3 TrajectoryHistory::position(double s) const { return at(s).x; }

namespace {
RetardedPoint finish(const TrajectoryHistory& h, double t, const Vec3& x, double s, bool moving) {
  RetardedPoint rp;
  const HistoryState st = h.at(s);
  rp.t_ret = s;
  rp.y = st.x;
  rp.xi = st.xi;
  rp.K = st.K;
  rp.v = st.v;
  rp.R = t - s;
  const Vec3 d = x - st.x;
  const double dn = d.norm();
  rp.n = dn > 0.0 ? Vec3(d / dn) : Vec3::Zero();
  rp.moving = moving;
  return rp;
}
}  // namespace

std::optional<RetardedPoint> retarded_time(const TrajectoryHistory& h, double t, const Vec3& x) {
  const double g0 = (x - h.x(0)).norm() - t;
  if (g0 > 0.0) return std::nullopt;
  if (g0 == 0.0) return finish(h, t, x, 0.0, true);
  // g(s) = |x - y(s)| - (t - s), increasing with g' = 1 - n.v
  double lo = 0.0, hi = t;
  HistoryState st = h.at(t);
  double s = t - (x - st.x).norm();
  if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
  double g = 0.0;
  for (int it = 0; it < 200; ++it) {
    st = h.at(s);
    const Vec3 d = x - st.x;
    const double dn = d.norm();
    g = dn - (t - s);
    if (g == 0.0) break;
    if (g < 0.0)
      lo = s;
    else
      hi = s;
    const double gp = dn > 0.0 ? 1.0 - d.dot(st.v) / dn : 1.0;
    if (!(gp > 0.0)) throw RetardedError("retarded_time: non-monotone light-cone function");
    double sn = s - g / gp;
    if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
    if (hi - lo < Tol::retarded_bracket && std::abs(g) < 1e-3 * Tol::retarded_residual) break;
    if (std::abs(sn - s) < 1e-16 * (1.0 + t)) {
      s = sn;
      break;
    }
    s = sn;
  }
  st = h.at(s);
  g = (x - st.x).norm() - (t - s);
  if (!(std::abs(g) < Tol::retarded_residual)) throw RetardedError("retarded_time: residual above tolerance");
  return finish(h, t, x, s, true);
}

RetardedPoint retarded_point(const TrajectoryHistory& h, double t, const Vec3& x) {
  if (auto rp = retarded_time(h, t, x)) return *rp;
  const double R = (x - h.x(0)).norm();
  return finish(h, t, x, t - R, false);
}

}  // namespace vlamax
