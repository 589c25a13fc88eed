#include "vlamax/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "vlamax/parallel.hpp"
#include "vlamax/quadrature.hpp"

namespace vlamax {

std::vector<PhaseState> sample_initial(const F0Spec& f0, int N, std::uint64_t seed) {
  return sample_f0(f0, N, seed, false);
}

EmpiricalMeasure phase_measure(const std::vector<PhaseState>& Z) {
  EmpiricalMeasure m;
  m.dim = 6;
  m.data.reserve(Z.size() * 6);
  for (const PhaseState& z : Z) {
    for (int c = 0; c < 3; ++c) m.data.push_back(z.x[c]);
    for (int c = 0; c < 3; ++c) m.data.push_back(z.xi[c]);
  }
  return m;
}

EmpiricalMeasure phase_measure(const TrajectorySet& ts, int frame) { return EmpiricalMeasure(6, ts.frames.at(frame)); }

InitialFields::InitialFields(const F0Spec& f0, const std::vector<PhaseState>& Z, const RescaledFormFactor& chi)
    : f0_(f0), chi_(chi), m_(RadialMollifier::single(chi)) {
  for (const PhaseState& z : Z) atoms_.push_back(z.x);
  // total smoothed charge of f0 must be one (Gauss compatibility of the Coulombic E_in)
  const double q = charge_within(f0_.x_radius + m_.radius() + 1.0);
  if (std::abs(q - 1.0) > 1e-6) throw std::runtime_error("build_fields: f0 charge not normalized");
}

double InitialFields::charge_within(double r) const {
  // Q(r) = int 4 pi a^2 rho(a) P(a) da, P(a) = mass of chi^N centred at distance a inside B_r
  const Rule1D& g = gauss_legendre(16);
  const int panels = 16;
  const double L = f0_.x_radius;
  double q = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = L * p / panels, hi = L * (p + 1) / panels;
    q += integrate_gl(g, lo, hi, [&](double a) {
      return 4.0 * std::numbers::pi * a * a * f0_.rho(a) * m_.ball_fraction(r, a);
    });
  }
  return q;
}

Vec3 InitialFields::E_macro(const Vec3& x) const {
  const double r = x.norm();
  if (r == 0.0) return Vec3::Zero();
  return charge_within(r) / (4.0 * std::numbers::pi * r * r * r) * x;
}

Vec3 InitialFields::E_micro(const Vec3& x) const {
  Vec3 E = Vec3::Zero();
  for (const Vec3& a : atoms_) E += smoothed_coulomb(m_, x - a);
  return E / static_cast<double>(atoms_.size());
}

double InitialFields::rho_micro(const Vec3& x) const {
  double s = 0.0;
  for (const Vec3& a : atoms_) s += chi_(x - a);
  return s / static_cast<double>(atoms_.size());
}

InitialFields build_fields(const F0Spec& f0, const std::vector<PhaseState>& Z, const RescaledFormFactor& chi) {
  return InitialFields(f0, Z, chi);
}

LatticeSpec LatticeSpec::make(double rbar, long N, int n_lat_override) {
  LatticeSpec s;
  s.rbar = rbar;
  if (n_lat_override > 0) {
    s.n_lat = n_lat_override;
  } else {
    int n = 1;
    while (static_cast<long>(n) * n * n < N) ++n;
    s.n_lat = n;
  }
  return s;
}

std::vector<Vec3> LatticeSpec::points() const {
  const int n = per_axis();
  const double h = spacing();
  std::vector<Vec3> p;
  p.reserve(static_cast<size_t>(n) * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        p.emplace_back(-rbar + (a + 0.5) * h, -rbar + (b + 0.5) * h, -rbar + (c + 0.5) * h);
  return p;
}

void lattice_fields(const std::vector<TrajectoryHistory>& src, double w, const FieldEvaluator& ev, double t,
                    const std::vector<Vec3>& pts, std::vector<Vec3>& E, std::vector<Vec3>& B) {
  E.assign(pts.size(), Vec3::Zero());
  B.assign(pts.size(), Vec3::Zero());
  parallel_for(static_cast<int>(pts.size()), [&](int k) {
    Vec3 e = Vec3::Zero(), b = Vec3::Zero();
    for (const TrajectoryHistory& h : src) {
      const FieldSample f = ev.source_total(h, t, pts[k]);
      e += f.E;
      b += f.B;
    }
    E[k] = w * e;
    B[k] = w * b;
  });
}

void write_sweep_header(std::ostream& os) {
  os << "# schema=vlamax.sweep.v1\n"
     << "config_hash,kind,status,N,seed_index,seed,r_N,gamma,delta,T,dt,M,control,"
        "sup_dx,sup_dxi,sup_dev,J_T,W1_0,W2_0,W1_half,W2_half,W1_T,W2_T,winf_T,mufromJ_ok,"
        "lattice_points,field_err_E,field_err_B,field_err,energy_drift,R_max,rho_max,W1_conc,"
        "subluminal_violations,vbar_exceeded,outside_regime\n";
}

void write_sweep_row(std::ostream& os, const SweepRow& r) {
  std::string status = r.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  os << std::setprecision(17) << r.config_hash << ',' << r.kind << ',' << status << ',' << r.N << ','
     << r.seed_index << ',' << r.seed << ',' << r.r_N << ',' << r.gamma << ',' << r.delta << ',' << r.T << ','
     << r.dt << ',' << r.M << ',' << int(r.control) << ',' << r.sup_dx << ',' << r.sup_dxi << ',' << r.sup_dev
     << ',' << r.J_T << ',' << r.W1_0 << ',' << r.W2_0 << ',' << r.W1_half << ',' << r.W2_half << ',' << r.W1_T
     << ',' << r.W2_T << ',' << r.winf_T << ',' << r.mufromJ_ok << ',' << r.lattice_points << ','
     << r.field_err_E << ',' << r.field_err_B << ',' << r.field_err << ',' << r.energy_drift << ',' << r.R_max
     << ',' << r.rho_max << ',' << r.W1_conc << ',' << r.subluminal_violations << ',' << int(r.vbar_exceeded)
     << ',' << int(r.outside_regime) << '\n';
}

NCache& RunCache::get(long N) {
  auto it = cache_.find(N);
  if (it != cache_.end()) return *it->second;
  auto c = std::make_unique<NCache>(N, cfg_.form_factor(N));
  c->ref = std::make_unique<ReferenceEnsemble>(cfg_.f0, c->chi, cfg_.reference_config(N));
  evolve_reference(*c->ref, cfg_.T);
  c->lattice = LatticeSpec::make(cfg_.support_radius(), N, cfg_.n_lat);
  c->pts = c->lattice.points();
  lattice_fields(c->ref->histories(), c->ref->weight(), c->ref->state.field_evaluator(), cfg_.T, c->pts, c->E_ref,
                 c->B_ref);
  return *(cache_[N] = std::move(c));
}

PairedRun run_paired(const ExperimentConfig& cfg, RunCache& cache, long N, int seed_index, bool control) {
  PairedRun out;
  SweepRow& r = out.row;
  r.config_hash = cfg.hash();
  r.N = N;
  r.seed_index = seed_index;
  r.seed = derive_seed(cfg.seed, N, seed_index);
  r.gamma = cfg.gamma;
  r.delta = cfg.delta;
  r.T = cfg.T;
  r.dt = cfg.dt;
  r.M = cfg.M;
  r.control = control;
  try {
    NCache& nc = cache.get(N);
    r.r_N = nc.chi.r();
    r.outside_regime = nc.ref->outside_regime();
    const std::vector<PhaseState> Z = sample_initial(cfg.f0, static_cast<int>(N), r.seed);
    const long nsteps = std::lround(cfg.T / cfg.dt);

    MicroState micro(Z, nc.chi, cfg.micro_config());
    EnergyGrid eg;
    eg.half_width = cfg.support_radius() + cfg.T;
    eg.n = cfg.energy_cells;
    const EnergyReport e0 = energy(micro, eg);
    if (control) {
      ReferenceView view(*nc.ref);
      while (micro.steps < nsteps) step(micro, &view);
    } else {
      while (micro.steps < nsteps) step(micro);
    }
    const EnergyReport eT = energy(micro, eg);
    r.energy_drift = std::abs(eT.total - e0.total) / std::abs(e0.total);
    r.R_max = micro.max_momentum;
    r.subluminal_violations = micro.subluminal_violations;
    r.vbar_exceeded = micro.vbar_exceeded;

    const MeanFieldFlow flow = track_flow(*nc.ref, Z, cfg.T);
    out.micro = trajectories(micro.hist);
    out.mf = flow.trajectories();
    const JComponents jc = chaos_process_J(out.micro, out.mf, ChaosMetricConfig::make(N, cfg.delta), cfg.T);
    r.sup_dx = jc.sup_dx;
    r.sup_dxi = jc.sup_dxi;
    r.J_T = jc.J;

    const int last = static_cast<int>(out.micro.frames.size()) - 1;
    double sup_dev = 0.0;
    for (int k = 0; k <= last; ++k)
      sup_dev = std::max(sup_dev, winf_upper(phase_measure(out.micro, k), phase_measure(out.mf, k)));
    r.sup_dev = sup_dev;
    auto w = [&](int k, double p) { return wasserstein_p(phase_measure(out.micro, k), phase_measure(out.mf, k), p); };
    r.W1_0 = w(0, 1);
    r.W2_0 = w(0, 2);
    r.W1_half = w(last / 2, 1);
    r.W2_half = w(last / 2, 2);
    r.W1_T = w(last, 1);
    r.W2_T = w(last, 2);
    r.winf_T = winf_upper(phase_measure(out.micro, last), phase_measure(out.mf, last));
    if (r.J_T < 1.0) {
      // pairing bound: W_p <= |Psi - Phi|_inf <= N^-delta J
      const double budget = std::pow(static_cast<double>(N), -cfg.delta) * r.J_T * (1.0 + 1e-12) + 1e-300;
      r.mufromJ_ok = (r.W2_T <= r.winf_T * (1.0 + 1e-12) && sup_dev <= budget) ? 1 : 0;
    }

    std::vector<Vec3> Em, Bm;
    lattice_fields(micro.hist, micro.weight(), micro.field_evaluator(), cfg.T, nc.pts, Em, Bm);
    r.lattice_points = static_cast<long>(nc.pts.size());
    double fe = 0.0, fb = 0.0, f = 0.0, rho = 0.0;
    for (size_t k = 0; k < nc.pts.size(); ++k) {
      const double de = (Em[k] - nc.E_ref[k]).norm(), db = (Bm[k] - nc.B_ref[k]).norm();
      fe = std::max(fe, de);
      fb = std::max(fb, db);
      f = std::max(f, std::hypot(de, db));
      double s = 0.0;
      for (const Vec3& x : micro.x) s += nc.chi(nc.pts[k] - x);
      rho = std::max(rho, s / static_cast<double>(N));
    }
    r.field_err_E = fe;
    r.field_err_B = fb;
    r.field_err = f;
    r.rho_max = rho;

    const std::vector<PhaseState> fresh = sample_initial(cfg.f0, static_cast<int>(N), derive_seed(r.seed, N, 7));
    r.W1_conc = wasserstein_p(phase_measure(Z), phase_measure(fresh), 1.0);
  } catch (const std::exception& e) {
    r.status = std::string("error: ") + e.what();
  }
  return out;
}

bool trend_non_increasing(const std::vector<double>& med, const std::vector<double>& q25,
                          const std::vector<double>& q75) {
  int inversions = 0;
  for (size_t i = 0; i + 1 < med.size(); ++i) {
    if (med[i + 1] <= med[i]) continue;
    ++inversions;
    // an increase counts as noise only if it stays inside both interquartile bands
    if (med[i + 1] > q75[i] || med[i] < q25[i + 1]) return false;
  }
  return inversions <= 1;
}

SweepReport sweep(const ExperimentConfig& cfg, const std::string& csv_path) {
  cfg.validate();
  SweepReport rep;
  std::ofstream os;
  if (!csv_path.empty()) {
    os.open(csv_path);
    if (!os) throw std::runtime_error("cannot open " + csv_path);
    write_sweep_header(os);
    os.flush();
  }
  RunCache cache(cfg);
  std::vector<double> Ns, dev, fld;
  for (long N : cfg.N_list) {
    SweepSummaryN s;
    s.N = N;
    std::vector<double> d, j, f;
    for (int k = 0; k < cfg.seeds; ++k) {
      const PairedRun pr = run_paired(cfg, cache, N, k);
      rep.rows.push_back(pr.row);
      if (os.is_open()) {
        write_sweep_row(os, pr.row);
        os.flush();
      }
      ++s.rows;
      if (pr.row.status != "ok") {
        ++s.failed;
        continue;
      }
      d.push_back(pr.row.sup_dev);
      j.push_back(pr.row.J_T);
      f.push_back(pr.row.field_err);
    }
    if (!d.empty()) {
      s.med_sup_dev = quantile(d, 0.5);
      s.q25_sup_dev = quantile(d, 0.25);
      s.q75_sup_dev = quantile(d, 0.75);
      s.med_J = quantile(j, 0.5);
      s.q25_J = quantile(j, 0.25);
      s.q75_J = quantile(j, 0.75);
      s.med_field = quantile(f, 0.5);
      s.q25_field = quantile(f, 0.25);
      s.q75_field = quantile(f, 0.75);
      Ns.push_back(static_cast<double>(N));
      dev.push_back(s.med_sup_dev);
      fld.push_back(s.med_field);
    }
    rep.per_N.push_back(s);
  }
  if (Ns.size() >= 2) {
    rep.slope_sup_dev = loglog_slope(Ns, dev);
    rep.slope_field = loglog_slope(Ns, fld);
  }
  return rep;
}

ConcentrationReport concentration_sweep(const ExperimentConfig& cfg, const std::string& csv_path) {
  ConcentrationReport rep;
  std::ofstream os;
  if (!csv_path.empty()) {
    os.open(csv_path);
    if (!os) throw std::runtime_error("cannot open " + csv_path);
    write_sweep_header(os);
  }
  auto sample = [&](long n, std::uint64_t seed) { return phase_measure(sample_initial(cfg.f0, static_cast<int>(n), seed)); };
  std::vector<double> Ns, med;
  for (long N : cfg.conc_N) {
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < cfg.conc_seeds; ++k) seeds.push_back(derive_seed(cfg.seed, N, 1000 + k));
    ConcentrationSummary s = concentration_probe(sample, N, 1.0, seeds, cfg.conc_ref_factor);
    if (os.is_open()) {
      for (int k = 0; k < s.seeds; ++k) {
        SweepRow r;
        r.config_hash = cfg.hash();
        r.kind = "concentration";
        r.status = s.approximate ? "approximate" : "ok";
        r.N = N;
        r.seed_index = k;
        r.seed = seeds[k];
        r.W1_conc = s.values[k];
        write_sweep_row(os, r);
      }
      os.flush();
    }
    Ns.push_back(static_cast<double>(N));
    med.push_back(s.median);
    rep.per_N.push_back(std::move(s));
  }
  if (Ns.size() >= 2) rep.slope = loglog_slope(Ns, med);
  return rep;
}

LLNReport lln_probe(const ReferenceEnsemble& ens, const std::vector<TrajectoryHistory>& tracers, double t,
                    const std::vector<Vec3>& pts) {
  const FieldEvaluator& ev = ens.state.field_evaluator();
  std::vector<double> gap(pts.size(), 0.0);
  const double wt = 1.0 / static_cast<double>(tracers.size());
  parallel_for(static_cast<int>(pts.size()), [&](int k) {
    Vec3 a = Vec3::Zero(), b = Vec3::Zero();
    for (const TrajectoryHistory& h : tracers) a += ev.source(h, t, pts[k]).E1;
    for (const TrajectoryHistory& h : ens.histories()) b += ev.source(h, t, pts[k]).E1;
    gap[k] = (wt * a - ens.weight() * b).norm();
  });
  LLNReport r;
  r.points = static_cast<long>(pts.size());
  for (double g : gap) {
    r.max_gap = std::max(r.max_gap, g);
    r.mean_gap += g;
  }
  if (!gap.empty()) r.mean_gap /= static_cast<double>(gap.size());
  return r;
}

}  // namespace vlamax
