#include "vlamax/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <boost/math/tools/roots.hpp>

namespace vlamax {

namespace {

double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

// one draw from the normalized bump of radius r by rejection against the uniform ball
Vec3 draw_bump(std::mt19937_64& rng, double r, long& tries, long& hits) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), a(0.0, 1.0);
  for (;;) {
    const Vec3 p(u(rng), u(rng), u(rng));
    ++tries;
    const double s = p.norm();
    if (s >= 1.0) continue;
    if (a(rng) * bump(0.0) < bump(s)) {
      ++hits;
      return r * p;
    }
    if (tries > 100000 && static_cast<double>(hits) / tries < 1e-4)
      throw std::runtime_error("sample_f0: rejection acceptance below 1e-4");
  }
}

// u-quantile of |y| for the normalized bump of radius 1
double radial_quantile(const RadialMollifier& m, double u) {
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve([&](double s) { return m.mass_within(s) - u; }, 0.0, 1.0,
                                                        -u, 1.0 - u, tol, iters);
  return 0.5 * (a + b);
}

// n directions of a spherical Fibonacci lattice, randomly rotated and shuffled
std::vector<Vec3> fibonacci_directions(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Eigen::Quaterniond q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> d(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n, rho = std::sqrt(1.0 - z * z);
    d[i] = q * Vec3(rho * std::cos(golden * i), rho * std::sin(golden * i), z);
  }
  std::shuffle(d.begin(), d.end(), rng);
  return d;
}

}  // namespace

double F0Spec::density(const Vec3& x, const Vec3& xi) const {
  static const FormFactor prof = make_standard_profile();
  const double rx = x_radius, rv = xi_radius;
  return prof(x.norm() / rx) / (rx * rx * rx) * prof(xi.norm() / rv) / (rv * rv * rv);
}

double F0Spec::rho(double r) const {
  static const FormFactor prof = make_standard_profile();
  return prof(r / x_radius) / (x_radius * x_radius * x_radius);
}

std::vector<PhaseState> sample_f0(const F0Spec& f0, int n, std::uint64_t seed, bool antithetic) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(ss);
  long tries = 0, hits = 0;
  std::vector<PhaseState> out;
  out.reserve(n);
  while (static_cast<int>(out.size()) < n) {
    PhaseState z;
    z.x = draw_bump(rng, f0.x_radius, tries, hits);
    z.xi = draw_bump(rng, f0.xi_radius, tries, hits);
    out.push_back(z);
    if (antithetic && static_cast<int>(out.size()) < n) out.push_back({z.x, -z.xi});
  }
  return out;
}

std::vector<PhaseState> sample_f0_stratified(const F0Spec& f0, int n, std::uint64_t seed) {
  static const FormFactor prof = make_standard_profile();
  static const RadialMollifier unit = RadialMollifier::single(RescaledFormFactor(prof, 1.0));
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(ss);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int half = (n + 1) / 2;
  std::vector<double> rx(half), rv(half);
  for (int i = 0; i < half; ++i) {
    rx[i] = f0.x_radius * radial_quantile(unit, (i + u(rng)) / half);
    rv[i] = f0.xi_radius * radial_quantile(unit, (i + u(rng)) / half);
  }
  std::shuffle(rx.begin(), rx.end(), rng);
  std::shuffle(rv.begin(), rv.end(), rng);
  const std::vector<Vec3> dx = fibonacci_directions(half, rng), dv = fibonacci_directions(half, rng);
  std::vector<PhaseState> out;
  out.reserve(n);
  for (int i = 0; i < half; ++i) {
    out.push_back({rx[i] * dx[i], rv[i] * dv[i]});
    if (static_cast<int>(out.size()) < n) out.push_back({-rx[i] * dx[i], -rv[i] * dv[i]});
  }
  return out;
}

ReferenceEnsemble::ReferenceEnsemble(const F0Spec& f0, const RescaledFormFactor& chi, const ReferenceConfig& c)
    : ReferenceEnsemble(sample_f0_stratified(f0, c.M, c.seed), chi, c) {}

ReferenceEnsemble::ReferenceEnsemble(const std::vector<PhaseState>& atoms, const RescaledFormFactor& chi,
                                     const ReferenceConfig& c)
    : cfg(c), state(atoms, chi, [&] {
        MicroConfig d = c.dyn;
        d.self_interaction = true;
        return d;
      }()) {
  cfg.M = static_cast<int>(atoms.size());
  max_momentum = momentum_support(state.xi);
}

Vec3 mean_field_force(const ReferenceEnsemble& ens, double t, const Vec3& x, const Vec3& xi) {
  Vec3 E = Vec3::Zero(), B = Vec3::Zero();
  for (const TrajectoryHistory& h : ens.histories()) {
    const FieldSample f = ens.state.force_evaluator().source_total(h, t, x);
    E += f.E;
    B += f.B;
  }
  return ens.weight() * lorentz_force({E, B}, xi);
}

void evolve_reference(ReferenceEnsemble& ens, double T) {
  const long n = std::lround(T / ens.state.cfg.dt);
  while (ens.state.steps < n) {
    step(ens.state);
    ens.max_momentum = std::max(ens.max_momentum, momentum_support(ens.state.xi));
  }
}

ReferenceView::ReferenceView(const ReferenceEnsemble& ens) : ens_(ens) {
  for (const TrajectoryHistory& h : ens.histories())
    view_.emplace_back(h.dt(), h.x(0), h.xi(0), Vec3::Zero(), h.static_past());
}

void ReferenceView::begin_step(int n) {
  for (size_t i = 0; i < view_.size(); ++i) {
    const TrajectoryHistory& h = ens_.histories()[i];
    if (n >= h.size()) throw std::out_of_range("ReferenceView: reference does not cover this step");
    // samples up to n; the newest carries the previous force until stage 1 of step n
    for (int k = view_[i].size(); k <= n; ++k) view_[i].append(h.x(k), h.xi(k), h.K(k - 1));
  }
}

void ReferenceView::after_stage1(int n, const std::vector<Vec3>&) {
  for (size_t i = 0; i < view_.size(); ++i) view_[i].set_last_force(ens_.histories()[i].K(n));
}

void ReferenceView::forces(double t, const std::vector<Vec3>& x, const std::vector<Vec3>& xi,
                           std::vector<Vec3>& F) const {
  lorentz_sum(view_, ens_.weight(), ens_.state.force_evaluator(), t, x, xi, true, F);
}

MeanFieldFlow track_flow(const ReferenceEnsemble& ens, const std::vector<PhaseState>& Z, double T) {
  const long n = std::lround(T / ens.state.cfg.dt);
  if (n > ens.state.steps) throw std::out_of_range("track_flow: reference shorter than T");
  MicroState tr(Z, ens.state.chi, ens.state.cfg);
  ReferenceView view(ens);
  while (tr.steps < n) step(tr, &view);
  return {std::move(tr.hist)};
}

}  // namespace vlamax
