#include <doctest.h>

#include "oracles.hpp"
#include "vlamax/transport.hpp"

using namespace vlamax;

namespace {

EmpiricalMeasure random_measure(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> a(static_cast<size_t>(n) * d);
  for (double& x : a) x = u(rng);
  return EmpiricalMeasure(d, std::move(a));
}

EmpiricalMeasure uniform_cube_sample(int d, long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(static_cast<size_t>(n) * d);
  for (double& x : a) x = u(rng);
  return EmpiricalMeasure(d, std::move(a));
}

TrajectorySet constant_frames(const std::vector<double>& frame, int frames, double dt) {
  TrajectorySet ts;
  for (int k = 0; k < frames; ++k) {
    ts.times.push_back(k * dt);
    ts.frames.push_back(frame);
  }
  return ts;
}

}  // namespace

TEST_CASE("small examples") {
  const EmpiricalMeasure X(1, {0.0, 1.0}), Y(1, {0.0, 10.0});
  CHECK(wasserstein_p(X, Y, 1.0) == doctest::Approx(4.5).epsilon(1e-15));
  const EmpiricalMeasure a(3, {1, 2, 3}), b(3, {4, 6, 3});
  for (double p : {1.0, 2.0, 3.5}) CHECK(wasserstein_p(a, b, p) == doctest::Approx(5.0).epsilon(1e-14));
  std::mt19937_64 rng(1);
  const EmpiricalMeasure m = random_measure(rng, 40, 6);
  CHECK(wasserstein_p(m, m, 1.0) == 0.0);
  CHECK(wasserstein_p(m, m, 2.0) == 0.0);
}

TEST_CASE("errors") {
  const EmpiricalMeasure a(3, {0, 0, 0}), b(3, {0, 0, 0, 1, 1, 1});
  CHECK_THROWS_AS(wasserstein_p(a, b, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein_p(a, a, 0.5), std::invalid_argument);
  const EmpiricalMeasure bad(3, {0, NAN, 0});
  CHECK_THROWS_AS(wasserstein_p(bad, a, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(winf_upper(a, b), std::invalid_argument);
  TrajectorySet s1 = constant_frames(std::vector<double>(6, 0.0), 3, 0.1);
  TrajectorySet s2 = constant_frames(std::vector<double>(6, 0.0), 4, 0.1);
  CHECK_THROWS_AS(chaos_process_J(s1, s2, ChaosMetricConfig::make(4, 0.1), 1.0), std::invalid_argument);
}

TEST_CASE("assignment equals brute force for n <= 7") {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 7; ++n)
    for (int trial = 0; trial < 6; ++trial)
      for (double p : {1.0, 2.0, 3.0}) {
        const EmpiricalMeasure a = random_measure(rng, n, 3), b = random_measure(rng, n, 3);
        const double w = wasserstein_p(a, b, p), ref = oracle::brute_force_wp(a, b, p);
        REQUIRE(std::abs(w - ref) <= 1e-12 * std::max(1.0, ref));
      }
}

TEST_CASE("dual potentials certify optimality") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 60;
    const EmpiricalMeasure a = random_measure(rng, n, 6), b = random_measure(rng, n, 6);
    Assignment as;
    const double w = wasserstein_p(a, b, 1.0, as);
    // feasibility u_i + v_j <= c_ij and strong duality sum u + sum v = primal
    double maxviol = 0.0, dual = 0.0;
    for (int i = 0; i < n; ++i) {
      dual += as.u[i] + as.v[i];
      for (int j = 0; j < n; ++j) maxviol = std::max(maxviol, as.u[i] + as.v[j] - pair_cost(a, i, b, j, 1.0));
    }
    CHECK(maxviol <= 1e-10);
    CHECK(dual / n <= w + 1e-10);
    CHECK(dual / n == doctest::Approx(w).epsilon(1e-10));
    // the matching is a permutation
    std::vector<int> c = as.col_for_row;
    std::sort(c.begin(), c.end());
    for (int i = 0; i < n; ++i) REQUIRE(c[i] == i);
  }
}

TEST_CASE("metric axioms and order monotonicity") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const EmpiricalMeasure a = random_measure(rng, 12, 3), b = random_measure(rng, 12, 3),
                           c = random_measure(rng, 12, 3);
    for (double p : {1.0, 2.0}) {
      const double ab = wasserstein_p(a, b, p), ba = wasserstein_p(b, a, p), bc = wasserstein_p(b, c, p),
                   ac = wasserstein_p(a, c, p);
      CHECK(ab == ba);
      CHECK(ac <= ab + bc + Tol::metric_axioms);
      CHECK(ab > 0.0);
    }
    CHECK(wasserstein_p(a, b, 1.0) <= wasserstein_p(a, b, 2.0) + 1e-12);
    CHECK(wasserstein_p(a, b, 2.0) <= wasserstein_p(a, b, 3.0) + 1e-12);
    // a permuted copy is the same multiset: distance zero
    EmpiricalMeasure perm = a;
    std::vector<int> idx(12);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < 12; ++i)
      for (int k = 0; k < 3; ++k) perm.data[3 * i + k] = a.atom(idx[i])[k];
    CHECK(wasserstein_p(a, perm, 2.0) == 0.0);
  }
}

TEST_CASE("matched-pairing bound dominates every W_p") {
  std::mt19937_64 rng(5);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 9;
    const EmpiricalMeasure a = random_measure(rng, n, 6), b = random_measure(rng, n, 6);
    const double u = winf_upper(a, b);
    for (double p : {1.0, 2.0, 3.0}) ok &= wasserstein_p(a, b, p) <= u + 1e-12;
  }
  CHECK(ok);
  const EmpiricalMeasure a = random_measure(rng, 10, 3);
  CHECK(winf_upper(a, a) == 0.0);
  EmpiricalMeasure b = a;
  b.data[3 * 4 + 1] += 0.37;
  CHECK(winf_upper(a, b) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("chaos process J") {
  CHECK(ChaosMetricConfig::make(4, 0.1).lambda_N == doctest::Approx(1.17741).epsilon(1e-5));
  CHECK(ChaosMetricConfig::make(2, 0.1).lambda_N == 1.0);
  for (long N : {4L, 64L, 4096L})
    CHECK(ChaosMetricConfig::make(N, 0.1).lambda_N == doctest::Approx(std::sqrt(std::log(double(N)))));

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  const int N = 16, F = 5;
  TrajectorySet a, b;
  std::vector<double> dx_sup(F), dxi_sup(F);
  for (int k = 0; k < F; ++k) {
    a.times.push_back(0.1 * k);
    b.times.push_back(0.1 * k);
    std::vector<double> fa(6 * N), fb(6 * N);
    for (int i = 0; i < 6 * N; ++i) {
      fa[i] = g(rng);
      fb[i] = fa[i] + 1e-4 * (k + 1) * g(rng);
    }
    a.frames.push_back(fa);
    b.frames.push_back(fb);
  }
  const ChaosMetricConfig cfg = ChaosMetricConfig::make(N, 0.1);
  CHECK(chaos_process_J(a, a, cfg, 0.4).J == 0.0);
  // independent evaluation of the formula
  double sx = 0, sxi = 0;
  for (int k = 0; k < F; ++k)
    for (int i = 0; i < N; ++i) {
      Vec3 dx, dxi;
      for (int c = 0; c < 3; ++c) {
        dx[c] = a.frames[k][6 * i + c] - b.frames[k][6 * i + c];
        dxi[c] = a.frames[k][6 * i + 3 + c] - b.frames[k][6 * i + 3 + c];
      }
      sx = std::max(sx, dx.norm());
      sxi = std::max(sxi, dxi.norm());
    }
  const JComponents jc = chaos_process_J(a, b, cfg, 0.4);
  const double Nd = std::pow(16.0, 0.1);
  CHECK(jc.J == doctest::Approx(std::min(1.0, std::sqrt(std::log(16.0)) * Nd * sx + Nd * sxi)).epsilon(1e-14));
  // non-decreasing in t
  double prev = 0.0;
  for (int k = 0; k < F; ++k) {
    const double J = chaos_process_J(a, b, cfg, 0.1 * k + 1e-12).J;
    CHECK(J >= prev);
    prev = J;
  }
  // cap
  for (auto& fr : b.frames) fr[0] += 100.0;
  CHECK(chaos_process_J(a, b, cfg, 0.4).J == 1.0);
}

TEST_CASE("Fournier-Guillin rate regimes") {
  CHECK(fournier_rate(4096, 2.0, 1.0 / 12.0) == doctest::Approx(std::exp(-64.0)).epsilon(1e-12));
  // p > 3: exponent 1 - 2 p alpha
  CHECK(fournier_rate(1000, 4.0, 0.05, 0.5, 2.0) ==
        doctest::Approx(2.0 * std::exp(-0.5 * std::pow(1000.0, 1.0 - 0.4))).epsilon(1e-12));
  // p = 3: log(2 + N^{3 alpha})^2 denominator
  const double l = std::log(2.0 + std::pow(500.0, 0.3));
  CHECK(fournier_rate(500, 3.0, 0.1) == doctest::Approx(std::exp(-500.0 / (l * l))).epsilon(1e-12));
  CHECK(fournier_rate(500, 1.0, 0.1) == doctest::Approx(std::exp(-std::pow(500.0, 0.4))).epsilon(1e-12));
}

TEST_CASE("quantiles and log-log slopes") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(std::isnan(quantile({}, 0.5)));
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("concentration probe") {
  auto sample = [](long n, std::uint64_t seed) { return uniform_cube_sample(6, n, seed); };
  // same sample against itself
  const EmpiricalMeasure s = sample(64, 9);
  CHECK(wasserstein_p(s, s, 1.0) == 0.0);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 8; ++k) seeds.push_back(100 + k);
  std::vector<double> med;
  for (long N : {16L, 64L, 256L}) med.push_back(concentration_probe(sample, N, 1.0, seeds, 2).median);
  CHECK(med[1] < med[0]);
  CHECK(med[2] < med[1]);
  // reference-size bias: doubling the reference changes the median by a bounded amount
  const ConcentrationSummary k2 = concentration_probe(sample, 64, 1.0, seeds, 2);
  const ConcentrationSummary k4 = concentration_probe(sample, 64, 1.0, seeds, 4);
  MESSAGE("reference bias (k=2 vs 4): " << k2.median << " vs " << k4.median);
  CHECK(std::abs(k4.median - k2.median) < 0.25 * k2.median);
  // budget reduction is flagged
  const ConcentrationSummary cut = concentration_probe(sample, 64, 1.0, {1}, 16, 256);
  CHECK(cut.ref_factor == 4);
  CHECK(cut.approximate);
}
