#include "vlamax/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vlamax {

namespace {
// one Dijkstra-like search from row i over reduced costs; returns the free column reached
int augmenting_path(int n, const std::vector<double>& c, const std::vector<double>& u,
                    const std::vector<double>& v, std::vector<int>& path, const std::vector<int>& row4col,
                    std::vector<double>& spc, int i, std::vector<char>& SR, std::vector<char>& SC,
                    std::vector<int>& remaining, double& min_val) {
  double mv = 0.0;
  int num_remaining = n;
  for (int it = 0; it < n; ++it) remaining[it] = n - it - 1;
  std::fill(SR.begin(), SR.end(), 0);
  std::fill(SC.begin(), SC.end(), 0);
  std::fill(spc.begin(), spc.end(), std::numeric_limits<double>::infinity());
  int sink = -1;
  while (sink == -1) {
    int index = -1;
    double lowest = std::numeric_limits<double>::infinity();
    SR[i] = 1;
    const double* ci = c.data() + static_cast<size_t>(i) * n;
    const double base = mv - u[i];
    for (int it = 0; it < num_remaining; ++it) {
      const int j = remaining[it];
      const double r = base + ci[j] - v[j];
      if (r < spc[j]) {
        path[j] = i;
        spc[j] = r;
      }
      if (spc[j] < lowest || (spc[j] == lowest && row4col[j] == -1)) {
        lowest = spc[j];
        index = it;
      }
    }
    mv = lowest;
    if (!std::isfinite(mv)) return -1;
    const int j = remaining[index];
    if (row4col[j] == -1)
      sink = j;
    else
      i = row4col[j];
    SC[j] = 1;
    remaining[index] = remaining[--num_remaining];
  }
  min_val = mv;
  return sink;
}
}  // namespace

Assignment solve_assignment(const std::vector<double>& c, int n) {
  if (n < 0 || c.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("solve_assignment: cost matrix size mismatch");
  for (double x : c)
    if (!std::isfinite(x)) throw std::invalid_argument("solve_assignment: non-finite cost");
  Assignment a;
  a.u.assign(n, 0.0);
  a.v.assign(n, 0.0);
  a.col_for_row.assign(n, -1);
  std::vector<int> row4col(n, -1), path(n, -1), remaining(n);
  std::vector<double> spc(n);
  std::vector<char> SR(n), SC(n);
  for (int cur = 0; cur < n; ++cur) {
    double mv = 0.0;
    const int sink = augmenting_path(n, c, a.u, a.v, path, row4col, spc, cur, SR, SC, remaining, mv);
    if (sink < 0) throw std::runtime_error("solve_assignment: infeasible");
    a.u[cur] += mv;
    for (int i = 0; i < n; ++i)
      if (SR[i] && i != cur) a.u[i] += mv - spc[a.col_for_row[i]];
    for (int j = 0; j < n; ++j)
      if (SC[j]) a.v[j] -= mv - spc[j];
    int j = sink;
    while (true) {
      const int i = path[j];
      row4col[j] = i;
      std::swap(a.col_for_row[i], j);
      if (i == cur) break;
    }
  }
  a.cost = 0.0;
  for (int i = 0; i < n; ++i) a.cost += c[static_cast<size_t>(i) * n + a.col_for_row[i]];
  return a;
}

double pair_cost(const EmpiricalMeasure& a, int i, const EmpiricalMeasure& b, int j, double p) {
  const double* x = a.atom(i);
  const double* y = b.atom(j);
  double s = 0.0;
  for (int k = 0; k < a.dim; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  if (p == 2.0) return s;
  const double d = std::sqrt(s);
  return p == 1.0 ? d : std::pow(d, p);
}

double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p, Assignment& out) {
  if (mu.dim != nu.dim || mu.size() != nu.size())
    throw std::invalid_argument("wasserstein_p: size mismatch");
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("wasserstein_p: p must be in [1, inf)");
  const int n = mu.size();
  if (n == 0) throw std::invalid_argument("wasserstein_p: empty measure");
  for (double x : mu.data)
    if (!std::isfinite(x)) throw std::invalid_argument("wasserstein_p: non-finite atom");
  for (double x : nu.data)
    if (!std::isfinite(x)) throw std::invalid_argument("wasserstein_p: non-finite atom");
  std::vector<double> c(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c[static_cast<size_t>(i) * n + j] = pair_cost(mu, i, nu, j, p);
  out = solve_assignment(c, n);
  // sum matched costs in sorted order so that W(mu, nu) == W(nu, mu) bit for bit
  std::vector<double> m(n);
  for (int i = 0; i < n; ++i) m[i] = c[static_cast<size_t>(i) * n + out.col_for_row[i]];
  std::sort(m.begin(), m.end());
  double total = 0.0;
  for (double v : m) total += v;
  return std::pow(std::max(total, 0.0) / n, 1.0 / p);
}

double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  Assignment a;
  return wasserstein_p(mu, nu, p, a);
}

double winf_upper(const EmpiricalMeasure& X, const EmpiricalMeasure& Y) {
  if (X.dim != Y.dim || X.size() != Y.size()) throw std::invalid_argument("winf_upper: size mismatch");
  double m = 0.0;
  for (int i = 0; i < X.size(); ++i) m = std::max(m, std::sqrt(pair_cost(X, i, Y, i, 2.0)));
  return m;
}

ChaosMetricConfig ChaosMetricConfig::make(long N, double delta) {
  ChaosMetricConfig c;
  c.delta = delta;
  c.lambda_N = std::max(1.0, std::sqrt(std::log(static_cast<double>(N))));
  return c;
}

JComponents chaos_process_J(const TrajectorySet& micro, const TrajectorySet& mf,
                            const ChaosMetricConfig& cfg, double t) {
  if (micro.times.size() != mf.times.size() || micro.frames.size() != micro.times.size() ||
      mf.frames.size() != mf.times.size())
    throw std::invalid_argument("chaos_process_J: time grid mismatch");
  JComponents out;
  const int N = micro.n_particles();
  if (N != mf.n_particles()) throw std::invalid_argument("chaos_process_J: particle count mismatch");
  for (size_t k = 0; k < micro.times.size(); ++k) {
    if (micro.times[k] != mf.times[k]) throw std::invalid_argument("chaos_process_J: time grid mismatch");
    if (micro.times[k] > t) break;
    const auto& a = micro.frames[k];
    const auto& b = mf.frames[k];
    for (int i = 0; i < N; ++i) {
      double dx = 0.0, dxi = 0.0;
      for (int c = 0; c < 3; ++c) {
        dx += (a[6 * i + c] - b[6 * i + c]) * (a[6 * i + c] - b[6 * i + c]);
        dxi += (a[6 * i + 3 + c] - b[6 * i + 3 + c]) * (a[6 * i + 3 + c] - b[6 * i + 3 + c]);
      }
      out.sup_dx = std::max(out.sup_dx, std::sqrt(dx));
      out.sup_dxi = std::max(out.sup_dxi, std::sqrt(dxi));
    }
  }
  const double Nd = std::pow(static_cast<double>(N), cfg.delta);
  out.J = std::min(1.0, cfg.lambda_N * Nd * out.sup_dx + Nd * out.sup_dxi);
  return out;
}

double fournier_rate(long N, double p, double alpha, double c, double cprime) {
  const double n = static_cast<double>(N);
  if (p > 3.0) return cprime * std::exp(-c * std::pow(n, 1.0 - 2.0 * p * alpha));
  if (p == 3.0) {
    const double l = std::log(2.0 + std::pow(n, 3.0 * alpha));
    return cprime * std::exp(-c * n / (l * l));
  }
  return cprime * std::exp(-c * std::pow(n, 1.0 - 6.0 * alpha));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const size_t k = static_cast<size_t>(pos);
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (pos - k) * (v[k + 1] - v[k]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConcentrationSummary concentration_probe(const std::function<EmpiricalMeasure(long, std::uint64_t)>& sample,
                                         long N, double p, const std::vector<std::uint64_t>& seeds,
                                         int ref_factor, long max_assignment) {
  ConcentrationSummary s;
  s.N = N;
  s.seeds = static_cast<int>(seeds.size());
  int k = std::max(1, ref_factor);
  while (k > 1 && static_cast<long>(k) * N > max_assignment) k /= 2;
  s.ref_factor = k;
  s.approximate = k < ref_factor;
  for (std::uint64_t seed : seeds) {
    const EmpiricalMeasure mu = sample(N, seed);
    // reference stream decorrelated from the sample stream
    const EmpiricalMeasure ref = sample(static_cast<long>(k) * N, seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL);
    EmpiricalMeasure rep;
    rep.dim = mu.dim;
    rep.data.reserve(ref.data.size());
    for (int i = 0; i < mu.size(); ++i)
      for (int r = 0; r < k; ++r) rep.data.insert(rep.data.end(), mu.atom(i), mu.atom(i) + mu.dim);
    s.values.push_back(wasserstein_p(rep, ref, p));
  }
  s.median = quantile(s.values, 0.5);
  s.q25 = quantile(s.values, 0.25);
  s.q75 = quantile(s.values, 0.75);
  return s;
}

}  // namespace vlamax
