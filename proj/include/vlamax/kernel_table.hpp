#pragma once
// Mollified present-position kernels m * k_pres, m * A, m * (n x A), tabulated on (|X|, |v|, cos angle).

#include <atomic>
#include <memory>
#include <vector>

#include "vlamax/form_factor.hpp"
#include "vlamax/kinematics.hpp"

namespace vlamax {

struct KernelTableOptions {
  int n_d = 96;
  int n_s = 19;
  int n_mu = 25;
  double s_max = 0.9;
  double d_max_factor = 6.0;  // table covers |X| <= factor * support radius
  int sphere_c = 32;
  int sphere_phi = 64;
  int radial = 16;
};

struct SmoothedKernels {
  Vec3 E1;  // (m * k_pres)(X, v)
  Mat3 A;   // (m * radiation)(X, v); E2 = A K
  Mat3 Bm;  // (m * n x radiation)(X, v); B2 = Bm K
};

class KernelTable {
 public:
  KernelTable(const RadialMollifier& m, const KernelTableOptions& opt);
  SmoothedKernels lookup(const Vec3& X, const Vec3& v) const;
  // direct quadrature of one table entry (used for building and for tests)
  SmoothedKernels direct(double d, double s, double mu, int nc, int nphi, int nr) const;
  long clamped_speed_count() const { return clamped_; }
  const KernelTableOptions& options() const { return opt_; }
  double d_max() const { return d_max_; }

 private:
  static constexpr int kComps = 11;
  RadialMollifier m_;
  KernelTableOptions opt_;
  double d_max_, dd_, ds_, dmu_;
  std::vector<double> tab_;  // [d][s][mu][comp]
  mutable std::atomic<long> clamped_{0};
};

// cached per mollifier identity and options
std::shared_ptr<const KernelTable> kernel_table_for(const RadialMollifier& m, const KernelTableOptions& opt);

}  // namespace vlamax
