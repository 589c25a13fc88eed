#include <doctest.h>

#include "oracles.hpp"
#include "vlamax/form_factor.hpp"

using namespace vlamax;

namespace {

const FormFactor& prof() {
  static const FormFactor p = make_standard_profile();
  return p;
}

Vec3 coulomb_h(const Vec3& y) {
  const double r = y.norm();
  return y / (r * r * r);
}

// (m * m)(u) by nested Gauss-Kronrod: int s^2 chi(s) 2pi int_{-1}^{1} chi(sqrt(u^2+s^2-2usc)) dc ds
double self_convolution(const RescaledFormFactor& chi, double u) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double R = chi.r();
  return GK::integrate(
      [&](double s) {
        if (s == 0.0) return 0.0;
        // only c with |u e - s w| < R contribute
        const double cmin = std::clamp((u * u + s * s - R * R) / (2 * u * s), -1.0, 1.0);
        const double inner = GK::integrate(
            [&](double c) { return chi(std::sqrt(std::max(0.0, u * u + s * s - 2 * u * s * c))); }, cmin, 1.0, 10,
            1e-12);
        return 2 * oracle::kPi * s * s * chi(s) * inner;
      },
      0.0, R, 10, 1e-12);
}

// mass of the radial m centred at distance a inside the ball of radius rad, split at the kinks
double ball_fraction_oracle(const std::function<double(double)>& m, double R, double rad, double a) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (a == 0.0) return oracle::radial_integral(m, std::min(rad, R));
  auto f = [&](double s) {
    if (s == 0.0) return 0.0;
    const double c = std::clamp((rad * rad - s * s - a * a) / (2 * a * s), -1.0, 1.0);
    return 2 * oracle::kPi * s * s * m(s) * (c + 1.0);
  };
  std::vector<double> br{0.0, R};
  for (double k : {std::abs(rad - a), rad + a})
    if (k < R) br.push_back(k);
  std::sort(br.begin(), br.end());
  double q = 0.0;
  for (size_t i = 0; i + 1 < br.size(); ++i)
    if (br[i + 1] > br[i]) q += GK::integrate(f, br[i], br[i + 1], 15, 1e-14);
  return q;
}

}  // namespace

TEST_CASE("standard profile: support, normalization, radial symmetry") {
  CHECK(prof()(1.0) == 0.0);
  CHECK(prof()(1.3) == 0.0);
  CHECK(prof()(0.5) > 0.0);
  const double mass = oracle::radial_integral([](double s) { return prof()(s); }, 1.0);
  CHECK(std::abs(mass - 1.0) < Tol::normalization);
  const RescaledFormFactor chi(prof(), 1.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = oracle::random_in_ball(rng, 1.0);
    const Mat3 Q = oracle::random_rotation(rng);
    REQUIRE(chi(x) == doctest::Approx(chi(Vec3(Q * x))).epsilon(1e-14));
  }
  // derivative against central differences
  for (double s : {0.1, 0.4, 0.7, 0.9}) {
    const double fd = (prof()(s + 1e-6) - prof()(s - 1e-6)) / 2e-6;
    CHECK(prof().derivative(s) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("rescaling") {
  CHECK(rescale(prof(), 4096, 1.0 / 12.0).r() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rescale(prof(), 1, 0.3).r() == 1.0);
  const RescaledFormFactor c = rescale(prof(), 512, 1.0 / 12.0);
  const double r = c.r();
  CHECK(std::abs(c.sup() / prof().sup() - 1.0 / (r * r * r)) < 1e-9 / (r * r * r));
  CHECK(oracle::radial_integral([&](double s) { return c(s); }, r) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(rescale(prof(), 512, 1.0 / 12.0, true), StrictModeError);
  CHECK_NOTHROW(rescale(prof(), 512, 0.08, true));
  CHECK_THROWS(rescale(prof(), 0, 0.1));
  CHECK_THROWS(rescale(prof(), 16, -0.1));
}

TEST_CASE("radial mollifier tables against independent quadrature") {
  const RescaledFormFactor chi(prof(), 0.3);
  const RadialMollifier m1 = RadialMollifier::single(chi);
  const RadialMollifier m2 = RadialMollifier::doubled(chi);
  CHECK(m1.radius() == doctest::Approx(0.3));
  CHECK(m2.radius() == doctest::Approx(0.6));
  for (double u : {0.0, 0.05, 0.12, 0.2, 0.29})
    CHECK(m1.value(u) == doctest::Approx(chi(u)).epsilon(1e-7));
  for (double u : {0.02, 0.1, 0.25, 0.4, 0.55}) {
    const double ref = self_convolution(chi, u);
    CHECK(m2.value(u) == doctest::Approx(ref).epsilon(1e-6).scale(chi.sup()));
  }
  CHECK(m1.mass_within(0.3) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m2.mass_within(0.6) == doctest::Approx(1.0).epsilon(1e-9));
  auto f1 = [&](double s) { return chi(s); };
  auto f2 = [&](double s) { return m2.value(s); };
  for (auto [rad, a] : {std::pair{0.5, 0.4}, {0.5, 0.6}, {0.2, 0.0}, {1.0, 0.9}, {0.1, 0.15}}) {
    CHECK(m1.ball_fraction(rad, a) == doctest::Approx(ball_fraction_oracle(f1, 0.3, rad, a)).epsilon(1e-7).scale(1));
    CHECK(m2.ball_fraction(rad, a) == doctest::Approx(ball_fraction_oracle(f2, 0.6, rad, a)).epsilon(1e-6).scale(1));
  }
  for (double d : {0.05, 0.2, 0.35, 1.0}) {
    const Vec3 x(d, 0, 0);
    const Vec3 ref = oracle::smoothed_coulomb_lines(chi, x);
    CHECK(m1.coulomb(d) == doctest::Approx(ref.x()).epsilon(1e-6));
  }
}

TEST_CASE("smooth_kernel: constants, Coulomb far field, value at the singular point") {
  const RescaledFormFactor chi(prof(), 0.25);
  const Vec3 c(1.5, -2.0, 0.25);
  const Vec3 s = smooth_kernel(chi, [&](const Vec3&) { return c; }, Vec3(0.3, 0.1, -0.2));
  CHECK((s - c).norm() < 1e-9 * c.norm());
  // far field: |x| = 4 r
  const Vec3 x(0.0, 0.6, 0.8);
  const Vec3 sk = smooth_kernel(chi, coulomb_h, x);
  const Vec3 ref = 4 * oracle::kPi * oracle::smoothed_coulomb_lines(chi, x);
  CHECK((sk - ref).norm() < 1e-6 * ref.norm());
  CHECK(sk.norm() <= 4.0 / x.squaredNorm());
  // 1/|y|^2 at the origin equals 4 pi int chi(s) ds, and scales like r^-2
  auto inv2 = [](const Vec3& y) { return Vec3(1.0 / y.squaredNorm(), 0, 0); };
  std::vector<double> scaled;
  for (double r : {0.25, 0.5}) {
    const RescaledFormFactor cr(prof(), r);
    const double val = smooth_kernel(cr, inv2, Vec3::Zero()).x();
    const double exact = oracle::radial_integral([&](double q) { return cr(q) / (q * q); }, r);
    CHECK(val == doctest::Approx(exact).epsilon(1e-7));
    scaled.push_back(val * r * r);
  }
  CHECK(scaled[0] == doctest::Approx(scaled[1]).epsilon(1e-7));
}

TEST_CASE("smooth_kernel commutes with translation") {
  const RescaledFormFactor chi(prof(), 0.3);
  const Vec3 a(0.4, -0.3, 0.2);
  auto h = [](const Vec3& y) { return Vec3(std::sin(y.x()) * y.y(), std::exp(-y.squaredNorm()), y.z() * y.z()); };
  for (const Vec3& x : {Vec3(0.1, 0.2, 0.3), Vec3(-0.5, 0.0, 0.7)}) {
    const Vec3 lhs = smooth_kernel(chi, [&](const Vec3& y) { return h(y - a); }, x);
    const Vec3 rhs = smooth_kernel(chi, h, x - a);
    CHECK((lhs - rhs).norm() < 1e-8);
  }
}

TEST_CASE("smooth_kernel reports an exhausted budget") {
  const RescaledFormFactor chi(prof(), 0.3);
  // discontinuous integrand: the adaptive rule cannot reach 1e-14 within a small budget
  auto step = [](const Vec3& y) { return Vec3(y.x() > 0.01 ? 1.0 : 0.0, 0, 0); };
  CHECK_THROWS_AS(smooth_kernel(chi, step, Vec3(0.05, 0, 0), Vec3::Zero(), 1e-14, 24), QuadratureError);
}

TEST_CASE("convolution envelopes for |y|^-2 and |y|^-3 kernels on a log radial grid") {
  // (i) |chi*h| <= C min(r^-2, |x|^-2) for h = y/|y|^3; (ii) |grad chi*h| <= C' min(r^-3, |x|^-3)
  std::vector<double> ratio1, ratio2;
  std::mt19937_64 rng(6);
  for (double r : {0.2, 0.45}) {
    const RescaledFormFactor chi(prof(), r);
    for (int k = 0; k <= 24; ++k) {
      const double d = r * std::pow(10.0, -2.0 + 4.0 * k / 24.0);
      const Vec3 x = d * oracle::random_unit(rng);
      const Vec3 v = smooth_kernel(chi, coulomb_h, x);
      const Mat3 G = smooth_kernel_gradient(chi, coulomb_h, x);
      ratio1.push_back(v.norm() / std::min(1 / (r * r), 1 / (d * d)));
      ratio2.push_back(G.norm() / std::min(1 / (r * r * r), 1 / (d * d * d)));
    }
  }
  const double C1 = *std::max_element(ratio1.begin(), ratio1.end());
  const double C2 = *std::max_element(ratio2.begin(), ratio2.end());
  MESSAGE("fitted constants C1 = " << C1 << ", C2 = " << C2);
  CHECK(C1 < 20.0);
  CHECK(C2 < 50.0);
  // one constant fitted on the first radius bounds the second radius as well (scale invariance)
  const double C1a = *std::max_element(ratio1.begin(), ratio1.begin() + 25);
  const double C2a = *std::max_element(ratio2.begin(), ratio2.begin() + 25);
  for (size_t i = 25; i < ratio1.size(); ++i) {
    CHECK(ratio1[i] <= C1a * (1 + 1e-5));
    CHECK(ratio2[i] <= C2a * (1 + 1e-5));
  }
}

TEST_CASE("far field: chi*(1/|y|^s) <= 2^s / |x|^s for |x| >= 2r") {
  const RescaledFormFactor chi(prof(), 0.3);
  for (double s : {1.0, 2.0, 3.0}) {
    for (double d : {0.6, 0.9, 2.0, 5.0}) {
      const Vec3 x(0, 0, d);
      const double v = smooth_kernel(chi, [&](const Vec3& y) { return Vec3(std::pow(y.norm(), -s), 0, 0); }, x).x();
      CHECK(v <= std::pow(2.0, s) / std::pow(d, s));
    }
  }
}
