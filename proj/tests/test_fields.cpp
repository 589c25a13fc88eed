#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "vlamax/fields.hpp"

using namespace vlamax;

namespace {

const FormFactor& prof() {
  static const FormFactor p = make_standard_profile();
  return p;
}

FieldOptions opts(FieldMode mode) {
  FieldOptions o;
  o.mode = mode;
  return o;
}

double rel(const Vec3& a, const Vec3& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("exact mode against smoothed Lienard-Wiechert potentials") {
  const RescaledFormFactor chi(prof(), 0.3);
  const RadialMollifier m = RadialMollifier::single(chi);
  const FieldEvaluator ev(m, opts(FieldMode::Exact));
  FieldOptions fine = opts(FieldMode::Exact);
  fine.exact_c = fine.exact_rho = 32;
  fine.exact_phi = 64;
  const FieldEvaluator ev_fine(m, fine);
  const TrajectoryHistory h =
      oracle::constant_force_history(Vec3::Zero(), Vec3(0.3, 0.1, 0.0), Vec3(0.0, 0.4, -0.2), 1.2, 0.01);
  const double t = 0.8;
  // next to the charge, and inside the shock shell
  for (const Vec3& x : {Vec3(0.25, 0.1, 0.0), Vec3(0.2, 0.75, 0.1)}) {
    const FieldSample ref = oracle::fields_from_potentials(h, m, t, x);
    const FieldSample got = ev.source_total(h, t, x), got_fine = ev_fine.source_total(h, t, x);
    MESSAGE("x = " << x.transpose() << "  relE = " << rel(got.E, ref.E) << " (order 32: " << rel(got_fine.E, ref.E)
                   << ")  |dB| = " << (got.B - ref.B).norm());
    CHECK(rel(got.E, ref.E) < 1e-5);
    CHECK((got.B - ref.B).norm() < 1e-5 * ref.E.norm());
    CHECK(rel(got_fine.E, ref.E) < 1e-6);
    CHECK((got_fine.B - ref.B).norm() < 1e-6 * ref.E.norm());
  }
}

TEST_CASE("tabulated mode is a controlled approximation of the exact one") {
  const RescaledFormFactor chi(prof(), 0.3);
  const RadialMollifier m = RadialMollifier::single(chi);
  const FieldEvaluator ex(m, opts(FieldMode::Exact)), tb(m, opts(FieldMode::Tabulated));
  const TrajectoryHistory h =
      oracle::constant_force_history(Vec3::Zero(), Vec3(0.3, 0.1, 0.0), Vec3(0.0, 0.4, -0.2), 1.2, 0.01);
  double worst = 0.0;
  for (const Vec3& x : {Vec3(0.25, 0.1, 0.0), Vec3(0.2, 0.75, 0.1), Vec3(-0.5, -0.5, 0.2), Vec3(0.1, 0.3, 0.5)}) {
    const FieldSample a = ex.source_total(h, 0.8, x), b = tb.source_total(h, 0.8, x);
    worst = std::max(worst, rel(b.E, a.E));
  }
  MESSAGE("tabulated vs exact, max relative E error " << worst);
  CHECK(worst < 0.1);
}

TEST_CASE("static charge: E0 + E1 equals the smoothed Coulomb field") {
  const RescaledFormFactor chi(prof(), 0.25);
  const RadialMollifier m = RadialMollifier::single(chi);
  const Vec3 y0(0.1, -0.2, 0.05);
  const TrajectoryHistory h(0.05, y0, Vec3::Zero());
  std::mt19937_64 rng(21);
  for (FieldMode mode : {FieldMode::Exact, FieldMode::Tabulated}) {
    const FieldEvaluator ev(m, opts(mode));
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Vec3 x = y0 + oracle::random_in_ball(rng, 0.8);
      const double t = (x - y0).norm() + chi.r() + 0.3;
      const FieldBreakdown f = ev.source(h, t, x);
      const Vec3 ref = oracle::smoothed_coulomb_lines(chi, x - y0);
      worst = std::max(worst, rel(f.E(), ref));
      CHECK(f.B().norm() < 1e-12 * ref.norm());
      CHECK(f.E2.norm() == 0.0);
    }
    MESSAGE(std::string(mode == FieldMode::Exact ? "exact" : "tabulated") << ": worst relative error " << worst);
    CHECK(worst < Tol::static_oracle_rel);
  }
}

TEST_CASE("initial-data terms") {
  const RescaledFormFactor chi(prof(), 0.2);
  const RadialMollifier m = RadialMollifier::single(chi);
  const FieldEvaluator ev(m, opts(FieldMode::Exact));
  const TrajectoryHistory h(0.05, Vec3::Zero(), Vec3(0.5, -0.3, 0.2));
  const std::vector<TrajectoryHistory> one{h};
  const SourceEnsemble ens{&one, 1.0};
  // E0 at t = 0 is the smoothed Coulomb field
  const Vec3 x(0.3, 0.1, -0.1);
  CHECK(rel(field_E0(ens, ev, 0.0, x), oracle::smoothed_coulomb_lines(chi, x)) < 1e-6);
  // shocks vanish away from the shell |x - x0| in (t - r, t + r)
  for (auto [t, d] : {std::pair{1.0, 0.5}, {0.3, 0.9}, {2.0, 1.5}}) {
    const auto [E, B] = field_E0prime_B0prime(ens, ev, t, Vec3(d, 0, 0));
    CHECK(E.norm() == 0.0);
    CHECK(B.norm() == 0.0);
  }
  // inside the shell they do not
  CHECK(field_E0prime_B0prime(ens, ev, 0.5, Vec3(0.5, 0, 0)).first.norm() > 0.0);
  // odd integrand: atom at rest, x at the atom
  const TrajectoryHistory rest(0.05, Vec3::Zero(), Vec3::Zero());
  Vec3 hE, hB;
  shock_kernel(m, 0.1, Vec3::Zero(), Vec3::Zero(), hE, hB);
  CHECK(hE.norm() < 1e-12 * chi.sup());
  // shock bound |h| <= C t r^-3 / (1 - vbar): C fitted at the largest radius holds for smaller ones
  std::vector<double> C;
  for (double r : {0.4, 0.2, 0.1}) {
    const RadialMollifier mr = RadialMollifier::single(RescaledFormFactor(prof(), r));
    double c = 0.0;
    const Vec3 v(0.6, 0.0, 0.0);
    for (double t : {0.5, 1.0})
      for (double d = t - r; d < t + r; d += r / 8)
        for (const Vec3& dir : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0)}) {
          shock_kernel(mr, t, d * dir, v, hE, hB);
          c = std::max(c, hE.norm() * (1 - 0.6) * r * r * r / t);
        }
    C.push_back(c);
  }
  MESSAGE("shock bound constants " << C[0] << ", " << C[1] << ", " << C[2]);
  CHECK(C[1] <= C[0]);
  CHECK(C[2] <= C[0]);
  // opposite coincident charges cancel
  const SourceEnsemble pos{&one, 1.0}, neg{&one, -1.0};
  CHECK((field_E0(pos, ev, 0.3, x) + field_E0(neg, ev, 0.3, x)).norm() == 0.0);
}

TEST_CASE("linearity, bit-exact sums, zero-force radiation, empty ensemble") {
  const RescaledFormFactor chi(prof(), 0.25);
  const RadialMollifier m = RadialMollifier::single(chi);
  for (FieldMode mode : {FieldMode::Exact, FieldMode::Tabulated}) {
    const FieldEvaluator ev(m, opts(mode));
    const TrajectoryHistory a = oracle::constant_force_history(Vec3(-0.3, 0, 0), Vec3(0.2, 0, 0.1),
                                                               Vec3(0, 0.3, 0), 1.0, 0.02);
    const TrajectoryHistory b = oracle::constant_force_history(Vec3(0.3, 0.1, 0), Vec3(-0.4, 0.2, 0),
                                                               Vec3::Zero(), 1.0, 0.02);
    const std::vector<TrajectoryHistory> both{a, b}, A{a}, B{b}, none;
    const Vec3 x(0.05, 0.2, -0.1);
    const FieldBreakdown fab = field_total({&both, 1.0}, ev, 0.7, x);
    const FieldBreakdown fa = field_total({&A, 1.0}, ev, 0.7, x), fb = field_total({&B, 1.0}, ev, 0.7, x);
    CHECK((fab.E() - (fa.E() + fb.E())).norm() < 1e-12 * fab.E().norm());
    CHECK((fab.B() - (fa.B() + fb.B())).norm() < 1e-12 * fab.E().norm());
    const Vec3 Es = ((fab.E0 + fab.E0p) + fab.E1) + fab.E2;
    CHECK(fab.E() == Es);
    // b has K = 0 throughout
    const auto [E2, B2] = field_E2_B2({&B, 1.0}, ev, 0.7, x);
    CHECK(E2.norm() == 0.0);
    CHECK(B2.norm() == 0.0);
    const auto [E1, B1] = field_E1_B1({&none, 1.0}, ev, 0.7, x);
    CHECK(E1.norm() == 0.0);
    CHECK(B1.norm() == 0.0);
    // finite on a 5^3 grid
    bool finite = true;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k) {
          const FieldBreakdown f = field_total({&both, 0.5}, ev, 0.7, Vec3(i - 2, j - 2, k - 2) * 0.4);
          finite &= f.E().allFinite() && f.B().allFinite();
        }
    CHECK(finite);
  }
}

TEST_CASE("radiation term decays like 1/R along a ray") {
  const RescaledFormFactor chi(prof(), 0.25);
  const RadialMollifier m = RadialMollifier::single(chi);
  const FieldEvaluator ev(m, opts(FieldMode::Exact));
  const TrajectoryHistory h = oracle::constant_force_history(Vec3::Zero(), Vec3::Zero(), Vec3(0.05, 0, 0), 2.0, 0.01);
  const std::vector<TrajectoryHistory> one{h};
  const Vec3 dir = Vec3(0.0, 1.0, 0.3).normalized();
  // same retarded time (about 1) for both probes
  const double d = 4.0;
  const Vec3 E2a = field_E2_B2({&one, 1.0}, ev, 1.0 + d, d * dir).first;
  const Vec3 E2b = field_E2_B2({&one, 1.0}, ev, 1.0 + 2 * d, 2 * d * dir).first;
  const double ratio = E2a.norm() / E2b.norm();
  MESSAGE("ratio " << ratio);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.025));
  // per-particle bound (8/(1-vbar)^2) |K| times the smoothed 1/R weight
  const double vbar = h.v(h.size() - 1).norm();
  const double bound = 8.0 / ((1 - vbar) * (1 - vbar)) * 0.05 / (4 * oracle::kPi * (d - chi.r()));
  CHECK(E2a.norm() <= bound);
}

TEST_CASE("kernel table against direct quadrature") {
  const RescaledFormFactor chi(prof(), 0.3);
  const RadialMollifier m = RadialMollifier::single(chi);
  KernelTableOptions o;
  const KernelTable tab(m, o);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double d = 0.05 + 1.2 * u(rng), s = 0.85 * u(rng), mu = 2 * u(rng) - 1;
    const SmoothedKernels ref = tab.direct(d, s, mu, 48, 96, 32);
    // the table's own frame: X along e1, v in the (e1, e2) plane
    const Vec3 X(d, 0, 0), v(s * mu, s * std::sqrt(1 - mu * mu), 0);
    const SmoothedKernels got = tab.lookup(X, v);
    worst = std::max(worst, (got.E1 - ref.E1).norm() / ref.E1.norm());
  }
  MESSAGE("table vs direct, worst relative E1 error " << worst);
  CHECK(worst < 5e-3);
}

TEST_CASE("field slice CSV") {
  const RescaledFormFactor chi(prof(), 0.3);
  const FieldEvaluator ev(RadialMollifier::single(chi), opts(FieldMode::Tabulated));
  const std::vector<TrajectoryHistory> one{TrajectoryHistory(0.1, Vec3::Zero(), Vec3::Zero())};
  const std::string path = (std::filesystem::temp_directory_path() / "vlamax_slice_test.csv").string();
  write_field_slice_csv(path, {&one, 1.0}, ev, 0.5, {Vec3(1, 0, 0), Vec3(0, 1, 0)});
  std::ifstream is(path);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(std::count(header.begin(), header.end(), ',') == 33);
  CHECK(std::count(row.begin(), row.end(), ',') == 33);
  CHECK(header.rfind("t,x,y,z,E0_x", 0) == 0);
  std::filesystem::remove(path);
}
