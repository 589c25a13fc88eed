// vlamax: command-line front end for runs, sweeps and diagnostics.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlamax/harness.hpp"
#include "vlamax/kernels.hpp"
#include "vlamax/snapshot.hpp"

namespace fs = std::filesystem;
using namespace vlamax;
using nlohmann::json;

namespace {

ExperimentConfig load(const std::string& path) {
  ExperimentConfig c;
  if (!path.empty()) return load_config(path);
  apply_env_overrides(c);
  c.validate();
  return c;
}

Snapshot snapshot_of(const MicroState& s, SnapshotRole role, std::uint64_t seed) {
  Snapshot sn;
  sn.role = role;
  sn.r_N = s.chi.r();
  sn.dt = s.cfg.dt;
  sn.t = s.time();
  sn.seed = seed;
  sn.x = s.x;
  sn.xi = s.xi;
  sn.K = s.K;
  return sn;
}

void save(const std::string& path, const Snapshot& s, bool as_json) {
  if (as_json)
    write_snapshot_json(path, s);
  else
    write_snapshot(path, s);
}

json summary_json(const SweepReport& rep, const ExperimentConfig& cfg) {
  json j;
  j["config_hash"] = cfg.hash();
  j["slope_sup_dev"] = rep.slope_sup_dev;
  j["slope_field"] = rep.slope_field;
  for (const SweepSummaryN& s : rep.per_N)
    j["per_N"].push_back({{"N", s.N}, {"rows", s.rows}, {"failed", s.failed},
                          {"median_sup_dev", s.med_sup_dev}, {"q25_sup_dev", s.q25_sup_dev},
                          {"q75_sup_dev", s.q75_sup_dev}, {"median_J", s.med_J}, {"q25_J", s.q25_J},
                          {"q75_J", s.q75_J}, {"median_field_err", s.med_field},
                          {"q25_field_err", s.q25_field}, {"q75_field_err", s.q75_field}});
  return j;
}

int run_check() {
  int fails = 0;
  auto report = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++fails;
  };
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 3.0);
  bool sub = true;
  for (int i = 0; i < 10000; ++i) sub &= velocity(Vec3(g(rng), g(rng), g(rng))).norm() < 1.0;
  report("velocity is sub-luminal", sub);
  bool coul = true;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x(g(rng), g(rng), g(rng));
    const Vec3 k = kernel_k(x, Vec3::Zero());
    const Vec3 ref = x / (4.0 * std::numbers::pi * x.squaredNorm() * x.norm());
    coul &= (k - ref).norm() <= 4 * std::numeric_limits<double>::epsilon() * ref.norm();
  }
  report("k(x,0) is the Coulomb kernel", coul);
  bool ot = true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5;
    std::vector<double> a(n * 3), b(n * 3);
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    EmpiricalMeasure A(3, a), B(3, b);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += pair_cost(A, i, B, perm[i], 1.0);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    ot &= std::abs(wasserstein_p(A, B, 1.0) - best / n) <= 1e-12;
  }
  report("assignment matches brute force", ot);
  return fails == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vlamax: Abraham model vs regularized Vlasov-Maxwell laboratory"};
  app.require_subcommand(1);
  std::string cfg_path;
  app.add_option("-c,--config", cfg_path, "INI configuration file");

  long N = 64;
  int seed_index = 0;
  bool as_json = false;
  std::string out;

  auto* sim = app.add_subcommand("simulate", "microscopic run, writes snapshots");
  sim->add_option("-N", N, "number of particles");
  sim->add_option("--seed-index", seed_index);
  sim->add_flag("--json", as_json, "JSON snapshots instead of binary");

  auto* mf = app.add_subcommand("meanfield", "build, evolve and cache a reference ensemble");
  mf->add_option("-N", N, "N selecting the form factor");
  mf->add_flag("--json", as_json);

  bool control = false;
  auto* paired = app.add_subcommand("paired", "one paired micro/mean-field row (CSV on stdout)");
  paired->add_option("-N", N);
  paired->add_option("--seed-index", seed_index);
  paired->add_flag("--control", control, "drive the micro particles by the mean-field force");

  bool with_conc = false;
  auto* sw = app.add_subcommand("sweep", "all (N, seed) rows; CSV and summary JSON in the output dir");
  sw->add_flag("--concentration", with_conc, "also run the concentration sweep");

  std::string snap_a, snap_b;
  double delta = 0.1;
  auto* met = app.add_subcommand("metrics", "distances between two snapshots (JSON)");
  met->add_option("a", snap_a)->required();
  met->add_option("b", snap_b)->required();
  met->add_option("--delta", delta);

  double t_field = -1.0;
  auto* fld = app.add_subcommand("fields", "lattice field export of a microscopic run");
  fld->add_option("-N", N);
  fld->add_option("--seed-index", seed_index);
  fld->add_option("-t", t_field, "time (default T)");
  fld->add_option("-o,--out", out, "CSV path");

  auto* chk = app.add_subcommand("check", "quick invariant battery");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*chk) return run_check();

    if (*met) {
      const Snapshot a = read_snapshot(snap_a), b = read_snapshot(snap_b);
      if (a.size() != b.size()) throw std::runtime_error("metrics: snapshots differ in size");
      const int n = static_cast<int>(a.size());
      auto measure = [](const Snapshot& s) {
        std::vector<double> d;
        for (size_t i = 0; i < s.size(); ++i) {
          for (int c = 0; c < 3; ++c) d.push_back(s.x[i][c]);
          for (int c = 0; c < 3; ++c) d.push_back(s.xi[i][c]);
        }
        return d;
      };
      TrajectorySet ta, tb;
      ta.times = tb.times = {a.t};
      ta.frames = {measure(a)};
      tb.frames = {measure(b)};
      const EmpiricalMeasure A(6, ta.frames[0]), B(6, tb.frames[0]);
      const JComponents jc = chaos_process_J(ta, tb, ChaosMetricConfig::make(n, delta), a.t);
      json j = {{"N", n}, {"t", a.t}, {"W1", wasserstein_p(A, B, 1.0)}, {"W2", wasserstein_p(A, B, 2.0)},
                {"Winf_upper", winf_upper(A, B)},
                {"J", {{"sup_dx", jc.sup_dx}, {"sup_dxi", jc.sup_dxi}, {"J", jc.J}, {"delta", delta}}}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    const ExperimentConfig cfg = load(cfg_path);
    fs::create_directories(cfg.output_dir);
    const std::string ext = as_json ? ".json" : ".bin";

    if (*sim) {
      const std::uint64_t seed = derive_seed(cfg.seed, N, seed_index);
      MicroState s(sample_initial(cfg.f0, static_cast<int>(N), seed), cfg.form_factor(N), cfg.micro_config());
      const long nsteps = std::lround(cfg.T / cfg.dt);
      const long every = cfg.snapshot_interval > 0 ? std::lround(cfg.snapshot_interval / cfg.dt) : nsteps;
      auto dump = [&] {
        const std::string p = cfg.output_dir + "/micro_N" + std::to_string(N) + "_s" + std::to_string(seed_index) +
                              "_step" + std::to_string(s.steps) + ext;
        save(p, snapshot_of(s, SnapshotRole::Micro, seed), as_json);
        std::cout << p << '\n';
      };
      dump();
      while (s.steps < nsteps) {
        step(s);
        if (s.steps % every == 0) dump();
      }
      std::cerr << "max |xi| = " << s.max_momentum << ", max |v| = " << s.max_speed << '\n';
      return 0;
    }

    if (*mf) {
      const ReferenceConfig rc = cfg.reference_config(N);
      std::ostringstream key;
      key << cfg.f0.x_radius << '|' << cfg.f0.xi_radius << '|' << rc.M << '|' << cfg.dt << '|' << cfg.T << '|'
          << rc.seed << '|' << cfg.form_factor(N).r();
      const std::string name = cfg.output_dir + "/reference_" +
                               std::to_string(std::hash<std::string>{}(key.str())) + ext;
      if (fs::exists(name)) {
        std::cout << name << " (cached)\n";
        return 0;
      }
      ReferenceEnsemble ens(cfg.f0, cfg.form_factor(N), rc);
      evolve_reference(ens, cfg.T);
      save(name, snapshot_of(ens.state, SnapshotRole::Reference, rc.seed), as_json);
      std::cout << name << '\n';
      if (ens.outside_regime()) std::cerr << "warning: momentum support exceeded R_max\n";
      return 0;
    }

    if (*paired) {
      RunCache cache(cfg);
      const PairedRun pr = run_paired(cfg, cache, N, seed_index, control);
      write_sweep_header(std::cout);
      write_sweep_row(std::cout, pr.row);
      return pr.row.status == "ok" ? 0 : 1;
    }

    if (*sw) {
      const SweepReport rep = sweep(cfg, cfg.output_dir + "/sweep.csv");
      json j = summary_json(rep, cfg);
      if (with_conc) {
        const ConcentrationReport cr = concentration_sweep(cfg, cfg.output_dir + "/concentration.csv");
        j["concentration_slope"] = cr.slope;
      }
      std::ofstream(cfg.output_dir + "/sweep_summary.json") << j.dump(2) << '\n';
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*fld) {
      const std::uint64_t seed = derive_seed(cfg.seed, N, seed_index);
      MicroState s(sample_initial(cfg.f0, static_cast<int>(N), seed), cfg.form_factor(N), cfg.micro_config());
      const double t = t_field >= 0.0 ? t_field : cfg.T;
      const long nsteps = std::lround(t / cfg.dt);
      while (s.steps < nsteps) step(s);
      const LatticeSpec lat = LatticeSpec::make(cfg.support_radius(), N, cfg.n_lat);
      if (out.empty()) out = cfg.output_dir + "/fields_N" + std::to_string(N) + ".csv";
      SourceEnsemble ens{&s.hist, s.weight()};
      write_field_slice_csv(out, ens, s.field_evaluator(), s.time(), lat.points());
      std::cout << out << " (" << lat.points().size() << " lattice points, spacing " << lat.spacing() << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
