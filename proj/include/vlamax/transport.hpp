#pragma once
// Exact optimal transport between equal-size empirical measures, and chaos diagnostics.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace vlamax {

// n atoms in R^d, equal weights; row-major storage
struct EmpiricalMeasure {
  int dim = 3;
  std::vector<double> data;
  EmpiricalMeasure() = default;
  EmpiricalMeasure(int d, std::vector<double> a) : dim(d), data(std::move(a)) {}
  int size() const { return dim == 0 ? 0 : static_cast<int>(data.size()) / dim; }
  const double* atom(int i) const { return data.data() + static_cast<size_t>(i) * dim; }
};

struct Assignment {
  std::vector<int> col_for_row;
  std::vector<double> u, v;  // dual potentials, u_i + v_j <= c_ij
  double cost = 0.0;         // sum of c_{i, col(i)} in row order
};

// Dense square assignment by shortest augmenting paths (O(n^3)).
Assignment solve_assignment(const std::vector<double>& cost, int n);

double pair_cost(const EmpiricalMeasure& a, int i, const EmpiricalMeasure& b, int j, double p);

double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

// same, but also returns the assignment (duals usable as a certificate)
double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p, Assignment& out);

// max_i |x_i - y_i|, index-aligned
double winf_upper(const EmpiricalMeasure& X, const EmpiricalMeasure& Y);

struct ChaosMetricConfig {
  double delta = 0.1;
  double lambda_N = 1.0;
  static ChaosMetricConfig make(long N, double delta);
};

struct JComponents {
  double sup_dx = 0.0;   // sup_s |Psi^1 - Phi^1|_inf
  double sup_dxi = 0.0;  // sup_s |Psi^2 - Phi^2|_inf
  double J = 0.0;
};

// trajectories: [time sample][particle] -> (x, xi) stored as 6 doubles per particle
struct TrajectorySet {
  std::vector<double> times;
  std::vector<std::vector<double>> frames;  // each frame: N*6 values
  int n_particles() const { return frames.empty() ? 0 : static_cast<int>(frames[0].size() / 6); }
};

JComponents chaos_process_J(const TrajectorySet& micro, const TrajectorySet& mf,
                            const ChaosMetricConfig& cfg, double t);

double fournier_rate(long N, double p, double alpha, double c = 1.0, double cprime = 1.0);

struct ConcentrationSummary {
  long N = 0;
  int seeds = 0;
  int ref_factor = 0;
  bool approximate = false;  // reference factor reduced to fit the solver budget
  double median = 0.0, q25 = 0.0, q75 = 0.0;
  std::vector<double> values;
};

// two-sample W_p between an N-sample and a (factor*N)-sample of f0; the N atoms are
// replicated factor times so the problem stays a square assignment
ConcentrationSummary concentration_probe(const std::function<EmpiricalMeasure(long, std::uint64_t)>& sample,
                                         long N, double p, const std::vector<std::uint64_t>& seeds,
                                         int ref_factor = 16, long max_assignment = 8192);

double quantile(std::vector<double> v, double q);

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vlamax
