#pragma once
#include <vector>

namespace vlamax {

struct Rule1D {
  std::vector<double> x, w;
  int size() const { return static_cast<int>(x.size()); }
};

// Gauss-Legendre on [-1,1] (Golub-Welsch), cached per order
const Rule1D& gauss_legendre(int n);

// sum_k w_k f(x_k) mapped to [a,b]
template <class F>
auto integrate_gl(const Rule1D& r, double a, double b, F&& f) {
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  auto acc = f(m + h * r.x[0]) * r.w[0];
  for (int k = 1; k < r.size(); ++k) acc += f(m + h * r.x[k]) * r.w[k];
  return acc * h;
}

}  // namespace vlamax
