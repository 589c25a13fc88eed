#pragma once
// Experiment orchestration: initial data, conventioned fields, paired micro/mean-field runs,
// lattice sampling and N-sweeps.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "vlamax/config.hpp"
#include "vlamax/meanfield.hpp"
#include "vlamax/transport.hpp"

namespace vlamax {

std::vector<PhaseState> sample_initial(const F0Spec& f0, int N, std::uint64_t seed);

EmpiricalMeasure phase_measure(const std::vector<PhaseState>& Z);
EmpiricalMeasure phase_measure(const TrajectorySet& ts, int frame);

// Initial fields. Macroscopic: E^N_in = chi^N * E_in with E_in the Coulomb field of rho[f0];
// microscopic: E^mu_in = E^N_in - grad G * (rho~[mu] - rho~[f0]), i.e. the smoothed Coulomb field
// of the atoms. B_in = 0 on both sides.
class InitialFields {
 public:
  InitialFields(const F0Spec& f0, const std::vector<PhaseState>& Z, const RescaledFormFactor& chi);
  Vec3 E_macro(const Vec3& x) const;
  Vec3 E_micro(const Vec3& x) const;
  Vec3 B_macro(const Vec3&) const { return Vec3::Zero(); }
  Vec3 B_micro(const Vec3&) const { return Vec3::Zero(); }
  double rho_micro(const Vec3& x) const;  // rho~[mu] = (1/N) sum chi^N(x - x_i)
  double charge_within(double r) const;   // charge of rho~[f0] inside the ball of radius r

 private:
  F0Spec f0_;
  RescaledFormFactor chi_;
  RadialMollifier m_;
  std::vector<Vec3> atoms_;
};

InitialFields build_fields(const F0Spec& f0, const std::vector<PhaseState>& Z, const RescaledFormFactor& chi);

// cell centres of a (3 n_lat)^3 lattice on [-rbar, rbar]^3, spacing 2 rbar / (3 n_lat)
struct LatticeSpec {
  double rbar = 2.5;
  int n_lat = 1;
  static LatticeSpec make(double rbar, long N, int n_lat_override = 0);
  int per_axis() const { return 3 * n_lat; }
  double spacing() const { return 2.0 * rbar / per_axis(); }
  std::vector<Vec3> points() const;
};

// smoothed field of a weighted source ensemble on a point list
void lattice_fields(const std::vector<TrajectoryHistory>& src, double w, const FieldEvaluator& ev, double t,
                    const std::vector<Vec3>& pts, std::vector<Vec3>& E, std::vector<Vec3>& B);

struct SweepRow {
  std::string config_hash, kind = "paired", status = "ok";
  long N = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  double r_N = 0, gamma = 0, delta = 0, T = 0, dt = 0;
  int M = 0;
  bool control = false;
  double sup_dx = NAN, sup_dxi = NAN, sup_dev = NAN, J_T = NAN;  // sup_dev: sup_s max_i |z_i - z~_i| in R^6
  double W1_0 = NAN, W2_0 = NAN, W1_half = NAN, W2_half = NAN, W1_T = NAN, W2_T = NAN, winf_T = NAN;
  int mufromJ_ok = -1;
  long lattice_points = 0;
  double field_err_E = NAN, field_err_B = NAN, field_err = NAN;
  double energy_drift = NAN, R_max = NAN, rho_max = NAN, W1_conc = NAN;
  long subluminal_violations = 0;
  bool vbar_exceeded = false, outside_regime = false;
};

void write_sweep_header(std::ostream& os);
void write_sweep_row(std::ostream& os, const SweepRow& r);

// Per-N shared work: form factor, evolved reference ensemble, reference fields on the lattice.
struct NCache {
  NCache(long n, const RescaledFormFactor& c) : N(n), chi(c) {}
  long N = 0;
  RescaledFormFactor chi;
  std::unique_ptr<ReferenceEnsemble> ref;
  LatticeSpec lattice;
  std::vector<Vec3> pts, E_ref, B_ref;
};

class RunCache {
 public:
  explicit RunCache(const ExperimentConfig& cfg) : cfg_(cfg) {}
  NCache& get(long N);

 private:
  const ExperimentConfig& cfg_;
  std::map<long, std::unique_ptr<NCache>> cache_;
};

struct PairedRun {
  SweepRow row;
  TrajectorySet micro, mf;
};

// One (N, seed) row. control = true drives the micro particles by the mean-field force.
PairedRun run_paired(const ExperimentConfig& cfg, RunCache& cache, long N, int seed_index, bool control = false);

struct SweepSummaryN {
  long N = 0;
  double med_sup_dev = 0, q25_sup_dev = 0, q75_sup_dev = 0;
  double med_J = 0, q25_J = 0, q75_J = 0;
  double med_field = 0, q25_field = 0, q75_field = 0;
  int rows = 0, failed = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<SweepSummaryN> per_N;
  double slope_sup_dev = NAN, slope_field = NAN;
};

// runs every (N, seed) row, appending to csv_path as it goes (rows are flushed one by one)
SweepReport sweep(const ExperimentConfig& cfg, const std::string& csv_path);

struct ConcentrationReport {
  std::vector<ConcentrationSummary> per_N;
  double slope = NAN;
};
ConcentrationReport concentration_sweep(const ExperimentConfig& cfg, const std::string& csv_path = "");

// non-increasing sequence allowing at most one inversion that stays inside the interquartile band
bool trend_non_increasing(const std::vector<double>& med, const std::vector<double>& q25,
                          const std::vector<double>& q75);

struct LLNReport {
  long points = 0;
  double max_gap = 0.0, mean_gap = 0.0;
};

// gap between the E1-type sums over tracers and over the reference ensemble on the lattice
LLNReport lln_probe(const ReferenceEnsemble& ens, const std::vector<TrajectoryHistory>& tracers, double t,
                    const std::vector<Vec3>& pts);

}  // namespace vlamax
