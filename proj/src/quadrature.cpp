#include "vlamax/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <mutex>
#include <stdexcept>

namespace vlamax {

namespace {
Rule1D build_gl(int n) {
  Rule1D r;
  if (n == 1) {
    r.x = {0.0};
    r.w = {2.0};
    return r;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  r.x.resize(n);
  r.w.resize(n);
  for (int k = 0; k < n; ++k) {
    r.x[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    r.w[k] = 2.0 * v0 * v0;
  }
  // one Newton sweep on P_n to push nodes to full precision
  for (int k = 0; k < n; ++k) {
    double x = r.x[k];
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
      if (it == 2) r.w[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    r.x[k] = x;
  }
  return r;
}
}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gl(n)).first;
  return it->second;
}

}  // namespace vlamax
