#include "vlamax/abraham.hpp"

#include <cmath>

#include "vlamax/parallel.hpp"

namespace vlamax {

void rk4_step(std::vector<Vec3>& x, std::vector<Vec3>& xi, double t, double dt, ForceProvider& force, int n,
              std::vector<Vec3>& K1) {
  const int N = static_cast<int>(x.size());
  std::vector<Vec3> K2(N), K3(N), K4(N), V1(N), V2(N), V3(N), V4(N), xs(N), xis(N);
  force.begin_step(n);
  force.forces(t, x, xi, K1);
  force.after_stage1(n, K1);
  for (int j = 0; j < N; ++j) {
    V1[j] = velocity(xi[j]);
    xs[j] = x[j] + 0.5 * dt * V1[j];
    xis[j] = xi[j] + 0.5 * dt * K1[j];
  }
  force.forces(t + 0.5 * dt, xs, xis, K2);
  for (int j = 0; j < N; ++j) {
    V2[j] = velocity(xis[j]);
    xs[j] = x[j] + 0.5 * dt * V2[j];
    xis[j] = xi[j] + 0.5 * dt * K2[j];
  }
  force.forces(t + 0.5 * dt, xs, xis, K3);
  for (int j = 0; j < N; ++j) {
    V3[j] = velocity(xis[j]);
    xs[j] = x[j] + dt * V3[j];
    xis[j] = xi[j] + dt * K3[j];
  }
  force.forces(t + dt, xs, xis, K4);
  for (int j = 0; j < N; ++j) {
    V4[j] = velocity(xis[j]);
    x[j] += (dt / 6.0) * (V1[j] + 2.0 * V2[j] + 2.0 * V3[j] + V4[j]);
    xi[j] += (dt / 6.0) * (K1[j] + 2.0 * K2[j] + 2.0 * K3[j] + K4[j]);
  }
}

void lorentz_sum(const std::vector<TrajectoryHistory>& src, double w, const FieldEvaluator& ev, double t,
                 const std::vector<Vec3>& x, const std::vector<Vec3>& xi, bool include_self,
                 std::vector<Vec3>& F) {
  const int N = static_cast<int>(x.size());
  const int M = static_cast<int>(src.size());
  F.assign(N, Vec3::Zero());
  parallel_for(N, [&](int j) {
    Vec3 E = Vec3::Zero(), B = Vec3::Zero();
    for (int i = 0; i < M; ++i) {
      if (!include_self && i == j) continue;
      const FieldSample f = ev.source_total(src[i], t, x[j]);
      E += f.E;
      B += f.B;
    }
    F[j] = w * lorentz_force({E, B}, xi[j]);
  });
}

namespace {

class SelfConsistent : public ForceProvider {
 public:
  explicit SelfConsistent(MicroState& s) : s_(s) {}
  void after_stage1(int, const std::vector<Vec3>& K1) override {
    // the force at the current sample is only known now; stages 2-4 see it
    for (int i = 0; i < s_.size(); ++i) s_.hist[i].set_last_force(K1[i]);
  }
  void forces(double t, const std::vector<Vec3>& x, const std::vector<Vec3>& xi,
              std::vector<Vec3>& F) const override {
    lorentz_sum(s_.hist, s_.weight(), *s_.force_ev, t, x, xi, s_.cfg.self_interaction, F);
  }

 private:
  MicroState& s_;
};

void monitor(MicroState& s) {
  for (const Vec3& q : s.xi) {
    const double sp = velocity(q).norm();
    if (!(sp < 1.0)) ++s.subluminal_violations;
    s.max_speed = std::max(s.max_speed, sp);
    s.max_momentum = std::max(s.max_momentum, q.norm());
    if (sp > s.cfg.vbar) s.vbar_exceeded = true;
  }
}

}  // namespace

MicroState::MicroState(const std::vector<PhaseState>& Z, const RescaledFormFactor& c, const MicroConfig& config)
    : cfg(config), chi(c) {
  if (Z.empty()) throw std::invalid_argument("init_micro: empty configuration");
  for (const PhaseState& z : Z) {
    if (!z.x.allFinite() || !z.xi.allFinite()) throw std::invalid_argument("init_micro: non-finite state");
    x.push_back(z.x);
    xi.push_back(z.xi);
    K.push_back(Vec3::Zero());
    hist.emplace_back(cfg.dt, z.x, z.xi, Vec3::Zero(), true);
  }
  force_ev = std::make_shared<FieldEvaluator>(RadialMollifier::doubled(chi), cfg.field);
  field_ev = std::make_shared<FieldEvaluator>(RadialMollifier::single(chi), cfg.field);
  monitor(*this);
}

MicroState init_micro(const std::vector<PhaseState>& Z, const RescaledFormFactor& chi, const MicroConfig& cfg) {
  return MicroState(Z, chi, cfg);
}

Vec3 force_on_particle(const MicroState& s, int i) {
  // same summation order as lorentz_sum
  Vec3 E = Vec3::Zero(), B = Vec3::Zero();
  for (int k = 0; k < s.size(); ++k) {
    if (!s.cfg.self_interaction && k == i) continue;
    const FieldSample f = s.force_ev->source_total(s.hist[k], s.time(), s.x[i]);
    E += f.E;
    B += f.B;
  }
  return s.weight() * lorentz_force({E, B}, s.xi[i]);
}

void step(MicroState& s, ForceProvider* external) {
  SelfConsistent own(s);
  ForceProvider& fp = external ? *external : static_cast<ForceProvider&>(own);
  const std::vector<Vec3> xi_old = s.xi;
  std::vector<Vec3> K1;
  rk4_step(s.x, s.xi, s.time(), s.cfg.dt, fp, static_cast<int>(s.steps), K1);
  if (external)
    for (int i = 0; i < s.size(); ++i) s.hist[i].set_last_force(K1[i]);
  for (int i = 0; i < s.size(); ++i) {
    const double jump = (s.xi[i] - xi_old[i]).norm();
    if (!std::isfinite(jump) || jump > s.cfg.max_dxi)
      throw InstabilityError("step: momentum jump " + std::to_string(jump) + " at particle " +
                             std::to_string(i) + ", t = " + std::to_string(s.time()));
  }
  s.K = K1;
  for (int i = 0; i < s.size(); ++i) s.hist[i].append(s.x[i], s.xi[i], K1[i]);
  ++s.steps;
  monitor(s);
}

EnergyReport energy(const MicroState& s, const EnergyGrid& g) {
  EnergyReport r;
  for (const Vec3& q : s.xi) r.kinetic += std::sqrt(1.0 + q.squaredNorm());
  r.kinetic /= s.size();
  const int n = g.n;
  const double h = 2.0 * g.half_width / n;
  const double vol = h * h * h;
  const double w = s.weight();
  const double t = s.time();
  const int planes = n;
  std::vector<double> tot(planes, 0.0), self(planes, 0.0), edge(planes, 0.0);
  parallel_for(planes, [&](int a) {
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const Vec3 p = g.center + Vec3(-g.half_width + (a + 0.5) * h, -g.half_width + (b + 0.5) * h,
                                       -g.half_width + (c + 0.5) * h);
        Vec3 E = Vec3::Zero(), B = Vec3::Zero();
        double es = 0.0;
        for (int i = 0; i < s.size(); ++i) {
          const FieldSample f = s.field_ev->source_total(s.hist[i], t, p);
          E += f.E;
          B += f.B;
          es += w * w * (f.E.squaredNorm() + f.B.squaredNorm());
        }
        const double e = w * w * (E.squaredNorm() + B.squaredNorm());
        tot[a] += e;
        self[a] += es;
        if (a == 0 || b == 0 || c == 0 || a == n - 1 || b == n - 1 || c == n - 1) edge[a] += e;
      }
  });
  double et = 0.0, ee = 0.0, es = 0.0;
  for (int a = 0; a < planes; ++a) {
    et += tot[a];
    ee += edge[a];
    es += self[a];
  }
  r.field = 0.5 * vol * et;
  r.self_field = 0.5 * vol * es;
  r.total = r.kinetic + r.field;
  r.spacing = h;
  r.points = static_cast<long>(n) * n * n;
  r.boundary_fraction = et > 0.0 ? ee / et : 0.0;
  r.truncation_warning = r.boundary_fraction > 0.01;
  return r;
}

double momentum_support(const std::vector<Vec3>& xi) {
  double m = 0.0;
  for (const Vec3& q : xi) m = std::max(m, q.norm());
  return m;
}

TrajectorySet trajectories(const std::vector<TrajectoryHistory>& h) {
  TrajectorySet ts;
  if (h.empty()) return ts;
  const int ns = h[0].size();
  for (int k = 0; k < ns; ++k) {
    ts.times.push_back(k * h[0].dt());
    std::vector<double> fr;
    fr.reserve(h.size() * 6);
    for (const TrajectoryHistory& q : h) {
      for (int c = 0; c < 3; ++c) fr.push_back(q.x(k)[c]);
      for (int c = 0; c < 3; ++c) fr.push_back(q.xi(k)[c]);
    }
    ts.frames.push_back(std::move(fr));
  }
  return ts;
}

}  // namespace vlamax
